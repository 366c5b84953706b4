#include "pba/tape.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "gradcheck.hpp"

using namespace pba;
using ad::Mat;
using ad::Tape;
using ad::Var;

namespace {

Mat randn(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("matmul chain gradients match finite differences") {
  std::mt19937_64 rng(5);
  std::vector<Mat> params = {randn(3, 4, rng), randn(4, 2, rng),
                             randn(1, 2, rng)};
  auto forward = [](const std::vector<Mat>& p,
                    std::vector<Mat>* grads) -> double {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& m : p) leaves.push_back(tape.leaf(m));
    Var h = ad::gelu(ad::add_rowvec(ad::matmul(leaves[0], leaves[1]),
                                    leaves[2]));
    Var loss = ad::mean(ad::mul(h, h));
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (Var v : leaves) grads->push_back(tape.grad(v.id));
    }
    return loss.value()(0, 0);
  };
  CHECK(pba::testing::max_gradient_error(params, forward) < 1e-6);
}

TEST_CASE("softmax cross entropy with ignored rows") {
  std::mt19937_64 rng(6);
  std::vector<Mat> params = {randn(5, 3, rng)};
  std::vector<int> targets = {0, -1, 2, 1, -1};
  auto forward = [&](const std::vector<Mat>& p,
                     std::vector<Mat>* grads) -> double {
    Tape tape;
    Var logits = tape.leaf(p[0]);
    Var loss = ad::softmax_cross_entropy_rows(logits, targets);
    if (grads) {
      tape.backward(loss);
      grads->assign(1, tape.grad(logits.id));
    }
    return loss.value()(0, 0);
  };
  CHECK(pba::testing::max_gradient_error(params, forward) < 1e-6);

  // ignored rows get exactly zero gradient
  std::vector<Mat> grads;
  forward(params, &grads);
  CHECK(grads[0].row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads[0].row(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weighted cross entropy gradients") {
  std::mt19937_64 rng(7);
  std::vector<Mat> params = {randn(4, 3, rng)};
  std::vector<int> targets = {2, 0, -1, 1};
  std::vector<double> weights = {1.0, 3.0, 1.0, 0.5};
  auto forward = [&](const std::vector<Mat>& p,
                     std::vector<Mat>* grads) -> double {
    Tape tape;
    Var logits = tape.leaf(p[0]);
    Var loss = ad::softmax_cross_entropy_rows(logits, targets, weights);
    if (grads) {
      tape.backward(loss);
      grads->assign(1, tape.grad(logits.id));
    }
    return loss.value()(0, 0);
  };
  CHECK(pba::testing::max_gradient_error(params, forward) < 1e-6);
}

TEST_CASE("layernorm, shape ops and reductions compose") {
  std::mt19937_64 rng(8);
  std::vector<Mat> params = {randn(6, 4, rng), Mat::Ones(1, 4),
                             randn(1, 4, rng)};
  std::vector<int> idx = {0, 3, 3, 5};
  auto forward = [&](const std::vector<Mat>& p,
                     std::vector<Mat>* grads) -> double {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& m : p) leaves.push_back(tape.leaf(m));
    Var normed = ad::layernorm_rows(leaves[0], leaves[1], leaves[2]);
    Var picked = ad::gather_rows(normed, idx);
    Var halves = ad::concat_cols({ad::cols(picked, 0, 2),
                                  ad::tanh_(ad::cols(picked, 2, 2))});
    Var lse = ad::logsumexp_colwise(ad::transpose(halves));
    Var loss = ad::add(ad::sum(lse), ad::entry(ad::sigmoid(picked), 1, 2));
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (Var v : leaves) grads->push_back(tape.grad(v.id));
    }
    return loss.value()(0, 0);
  };
  CHECK(pba::testing::max_gradient_error(params, forward) < 1e-6);
}

TEST_CASE("softmax_rows values and gradients") {
  Tape tape;
  Mat logits(2, 3);
  logits << 1.0, 1.0, 1.0, 0.0, 100.0, 0.0;
  Var v = tape.leaf(logits);
  Mat probs = ad::softmax_rows(v).value();
  CHECK(probs(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(probs.row(0).sum() == doctest::Approx(1.0));
  CHECK(probs(1, 1) == doctest::Approx(1.0));

  std::mt19937_64 rng(9);
  std::vector<Mat> params = {randn(3, 4, rng)};
  Mat weight = randn(3, 4, rng);
  auto forward = [&](const std::vector<Mat>& p,
                     std::vector<Mat>* grads) -> double {
    Tape tape2;
    Var x = tape2.leaf(p[0]);
    Var loss = ad::mean(ad::mul(ad::softmax_rows(x), tape2.leaf(weight)));
    if (grads) {
      tape2.backward(loss);
      grads->assign(1, tape2.grad(x.id));
    }
    return loss.value()(0, 0);
  };
  CHECK(pba::testing::max_gradient_error(params, forward) < 1e-6);
}

TEST_CASE("adam converges on a quadratic") {
  ad::ParamStore store;
  Mat target(2, 2);
  target << 1.0, -2.0, 0.5, 3.0;
  int w = store.add("w", Mat::Zero(2, 2));
  ad::AdamConfig cfg;
  cfg.lr = 0.05;
  for (int step = 0; step < 500; ++step) {
    Tape tape;
    auto leaves = store.attach(tape);
    Var diff = ad::sub(leaves[w], tape.leaf(target));
    Var loss = ad::sum(ad::mul(diff, diff));
    tape.backward(loss);
    store.adam_step(tape, leaves, cfg);
  }
  CHECK((store.value(w) - target).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("param store save/load restores values and step count") {
  ad::ParamStore store;
  std::mt19937_64 rng(10);
  store.add("a", randn(2, 3, rng));
  store.add("b", randn(1, 5, rng));
  std::stringstream buf;
  store.save(buf);

  ad::ParamStore other;
  other.add("a", Mat::Zero(2, 3));
  other.add("b", Mat::Zero(1, 5));
  other.load(buf);
  CHECK(other.value(0) == store.value(0));
  CHECK(other.value(1) == store.value(1));
}
