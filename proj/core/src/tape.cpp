#include "pba/tape.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "pba/errors.hpp"

namespace pba::ad {

const Mat& Var::value() const { return tape->value(id); }

Var Tape::leaf(Mat value) { return push(std::move(value), {}); }

Var Tape::push(Mat value, std::function<void(Tape&, int)> back) {
  nodes_.push_back({std::move(value), Mat(), std::move(back)});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var root) {
  if (value(root.id).size() != 1)
    throw Error("backward: root must be a 1x1 scalar");
  for (auto& n : nodes_) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  nodes_[root.id].grad(0, 0) = 1.0;
  for (int i = root.id; i >= 0; --i)
    if (nodes_[i].back) nodes_[i].back(*this, i);
}

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw Error("autodiff: vars from different tapes");
}

}  // namespace

Var add(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape->push(a.value() + b.value(), [a, b](Tape& t, int self) {
    t.grad(a.id) += t.grad(self);
    t.grad(b.id) += t.grad(self);
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape->push(a.value() - b.value(), [a, b](Tape& t, int self) {
    t.grad(a.id) += t.grad(self);
    t.grad(b.id) -= t.grad(self);
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape->push(a.value().cwiseProduct(b.value()),
                      [a, b](Tape& t, int self) {
                        t.grad(a.id) += t.grad(self).cwiseProduct(t.value(b.id));
                        t.grad(b.id) += t.grad(self).cwiseProduct(t.value(a.id));
                      });
}

Var scale(Var a, double c) {
  return a.tape->push(a.value() * c, [a, c](Tape& t, int self) {
    t.grad(a.id) += t.grad(self) * c;
  });
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape->push(a.value() * b.value(), [a, b](Tape& t, int self) {
    t.grad(a.id) += t.grad(self) * t.value(b.id).transpose();
    t.grad(b.id) += t.value(a.id).transpose() * t.grad(self);
  });
}

Var transpose(Var a) {
  return a.tape->push(a.value().transpose(), [a](Tape& t, int self) {
    t.grad(a.id) += t.grad(self).transpose();
  });
}

Var add_rowvec(Var a, Var row) {
  check_same_tape(a, row);
  Mat out = a.value();
  out.rowwise() += Eigen::RowVectorXd(row.value().row(0));
  return a.tape->push(std::move(out), [a, row](Tape& t, int self) {
    t.grad(a.id) += t.grad(self);
    t.grad(row.id) += t.grad(self).colwise().sum();
  });
}

Var add_colvec(Var a, Var col) {
  check_same_tape(a, col);
  Mat out = a.value();
  out.colwise() += Eigen::VectorXd(col.value().col(0));
  return a.tape->push(std::move(out), [a, col](Tape& t, int self) {
    t.grad(a.id) += t.grad(self);
    t.grad(col.id) += t.grad(self).rowwise().sum();
  });
}

Var rows(Var a, int start, int n) {
  return a.tape->push(a.value().middleRows(start, n),
                      [a, start, n](Tape& t, int self) {
                        t.grad(a.id).middleRows(start, n) += t.grad(self);
                      });
}

Var cols(Var a, int start, int n) {
  return a.tape->push(a.value().middleCols(start, n),
                      [a, start, n](Tape& t, int self) {
                        t.grad(a.id).middleCols(start, n) += t.grad(self);
                      });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error("concat_rows: no parts");
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.value().rows();
  Mat out(total, parts[0].value().cols());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.value().rows()) = p.value();
    at += p.value().rows();
  }
  auto ps = parts;
  return parts[0].tape->push(std::move(out), [ps](Tape& t, int self) {
    Eigen::Index at = 0;
    for (const auto& p : ps) {
      t.grad(p.id) += t.grad(self).middleRows(at, t.value(p.id).rows());
      at += t.value(p.id).rows();
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error("concat_cols: no parts");
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.value().cols();
  Mat out(parts[0].value().rows(), total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.value().cols()) = p.value();
    at += p.value().cols();
  }
  auto ps = parts;
  return parts[0].tape->push(std::move(out), [ps](Tape& t, int self) {
    Eigen::Index at = 0;
    for (const auto& p : ps) {
      t.grad(p.id) += t.grad(self).middleCols(at, t.value(p.id).cols());
      at += t.value(p.id).cols();
    }
  });
}

Var entry(Var a, int i, int j) {
  Mat out(1, 1);
  out(0, 0) = a.value()(i, j);
  return a.tape->push(std::move(out), [a, i, j](Tape& t, int self) {
    t.grad(a.id)(i, j) += t.grad(self)(0, 0);
  });
}

Var gather_rows(Var table, const std::vector<int>& indices) {
  const Mat& src = table.value();
  Mat out(static_cast<Eigen::Index>(indices.size()), src.cols());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = src.row(indices[i]);
  return table.tape->push(std::move(out), [table, indices](Tape& t, int self) {
    for (std::size_t i = 0; i < indices.size(); ++i)
      t.grad(table.id).row(indices[i]) +=
          t.grad(self).row(static_cast<Eigen::Index>(i));
  });
}

Var relu(Var a) {
  return a.tape->push(a.value().cwiseMax(0.0), [a](Tape& t, int self) {
    t.grad(a.id).array() +=
        t.grad(self).array() * (t.value(a.id).array() > 0.0).cast<double>();
  });
}

namespace {
constexpr double inv_sqrt2 = 0.7071067811865475;
constexpr double inv_sqrt2pi = 0.3989422804014327;
}  // namespace

Var gelu(Var a) {
  Mat out = a.value().unaryExpr([](double x) {
    return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
  });
  return a.tape->push(std::move(out), [a](Tape& t, int self) {
    const Mat& x = t.value(a.id);
    Mat d = x.unaryExpr([](double v) {
      double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
      double pdf = inv_sqrt2pi * std::exp(-0.5 * v * v);
      return cdf + v * pdf;
    });
    t.grad(a.id) += t.grad(self).cwiseProduct(d);
  });
}

Var tanh_(Var a) {
  return a.tape->push(a.value().array().tanh().matrix(),
                      [a](Tape& t, int self) {
                        const Mat& y = t.value(self);
                        t.grad(a.id).array() +=
                            t.grad(self).array() * (1.0 - y.array().square());
                      });
}

Var sigmoid(Var a) {
  Mat out = a.value().unaryExpr(
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return a.tape->push(std::move(out), [a](Tape& t, int self) {
    const Mat& y = t.value(self);
    t.grad(a.id).array() +=
        t.grad(self).array() * y.array() * (1.0 - y.array());
  });
}

Var sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->push(std::move(out), [a](Tape& t, int self) {
    t.grad(a.id).array() += t.grad(self)(0, 0);
  });
}

Var mean(Var a) {
  double n = static_cast<double>(a.value().size());
  Mat out(1, 1);
  out(0, 0) = a.value().sum() / n;
  return a.tape->push(std::move(out), [a, n](Tape& t, int self) {
    t.grad(a.id).array() += t.grad(self)(0, 0) / n;
  });
}

Var softmax_rows(Var a) {
  Mat out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double mx = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - mx).exp();
    out.row(r) /= out.row(r).sum();
  }
  return a.tape->push(std::move(out), [a](Tape& t, int self) {
    const Mat& s = t.value(self);
    const Mat& dy = t.grad(self);
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      double dot = dy.row(r).dot(s.row(r));
      t.grad(a.id).row(r).array() +=
          s.row(r).array() * (dy.row(r).array() - dot);
    }
  });
}

Var layernorm_rows(Var x, Var gain, Var bias, double eps) {
  const Mat& in = x.value();
  Eigen::Index cols_n = in.cols();
  Mat xhat(in.rows(), cols_n);
  Eigen::VectorXd inv_sigma(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double mu = in.row(r).mean();
    double var = (in.row(r).array() - mu).square().mean();
    inv_sigma(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_sigma(r);
  }
  Mat out = xhat;
  out.array().rowwise() *= gain.value().row(0).array();
  out.rowwise() += Eigen::RowVectorXd(bias.value().row(0));
  return x.tape->push(
      std::move(out),
      [x, gain, bias, xhat, inv_sigma](Tape& t, int self) {
        const Mat& dy = t.grad(self);
        Eigen::ArrayXXd dxhat =
            dy.array().rowwise() * t.value(gain.id).row(0).array();
        for (Eigen::Index r = 0; r < dy.rows(); ++r) {
          double m1 = dxhat.row(r).mean();
          double m2 = (dxhat.row(r) * xhat.row(r).array()).mean();
          t.grad(x.id).row(r).array() +=
              inv_sigma(r) * (dxhat.row(r) - m1 - xhat.row(r).array() * m2);
        }
        t.grad(gain.id).row(0).array() +=
            (dy.array() * xhat.array()).colwise().sum();
        t.grad(bias.id).row(0) += dy.colwise().sum();
      });
}

Var logsumexp_colwise(Var a) {
  const Mat& in = a.value();
  Mat out(1, in.cols());
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    double mx = in.col(c).maxCoeff();
    out(0, c) = mx + std::log((in.col(c).array() - mx).exp().sum());
  }
  return a.tape->push(std::move(out), [a](Tape& t, int self) {
    const Mat& in = t.value(a.id);
    const Mat& out = t.value(self);
    const Mat& dy = t.grad(self);
    for (Eigen::Index c = 0; c < in.cols(); ++c)
      t.grad(a.id).col(c).array() +=
          dy(0, c) * (in.col(c).array() - out(0, c)).exp();
  });
}

Var softmax_cross_entropy_rows(Var logits, const std::vector<int>& targets,
                               const std::vector<double>& weights) {
  const Mat& in = logits.value();
  if (static_cast<Eigen::Index>(targets.size()) != in.rows())
    throw Error("softmax_cross_entropy_rows: target count != rows");
  if (weights.size() != targets.size())
    throw Error("softmax_cross_entropy_rows: weight count != rows");
  Mat probs(in.rows(), in.cols());
  double loss = 0.0;
  double total_w = 0.0;
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double mx = in.row(r).maxCoeff();
    Eigen::ArrayXd ex = (in.row(r).array() - mx).exp();
    double z = ex.sum();
    probs.row(r) = (ex / z).matrix().transpose();
    if (targets[r] >= 0) {
      loss += weights[r] * (std::log(z) + mx - in(r, targets[r]));
      total_w += weights[r];
    }
  }
  if (total_w <= 0.0)
    throw Error("softmax_cross_entropy_rows: no labeled rows");
  Mat out(1, 1);
  out(0, 0) = loss / total_w;
  return logits.tape->push(
      std::move(out),
      [logits, targets, weights, probs, total_w](Tape& t, int self) {
        double g = t.grad(self)(0, 0) / total_w;
        for (Eigen::Index r = 0; r < probs.rows(); ++r) {
          if (targets[r] < 0) continue;
          t.grad(logits.id).row(r) += g * weights[r] * probs.row(r);
          t.grad(logits.id)(r, targets[r]) -= g * weights[r];
        }
      });
}

Var softmax_cross_entropy_rows(Var logits, const std::vector<int>& targets) {
  return softmax_cross_entropy_rows(
      logits, targets, std::vector<double>(targets.size(), 1.0));
}

// --- ParamStore ---

int ParamStore::add(const std::string& name, Mat init) {
  names_.push_back(name);
  m_.push_back(Mat::Zero(init.rows(), init.cols()));
  v_.push_back(Mat::Zero(init.rows(), init.cols()));
  values_.push_back(std::move(init));
  return static_cast<int>(values_.size()) - 1;
}

std::vector<Var> ParamStore::attach(Tape& tape) const {
  std::vector<Var> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(tape.leaf(v));
  return out;
}

void ParamStore::adam_step(Tape& tape, const std::vector<Var>& leaves,
                           const AdamConfig& cfg) {
  ++step_;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Mat& g = tape.grad(leaves[i].id);
    m_[i] = cfg.beta1 * m_[i] + (1.0 - cfg.beta1) * g;
    v_[i] = cfg.beta2 * v_[i].array().matrix() +
            (1.0 - cfg.beta2) * g.cwiseProduct(g);
    Eigen::ArrayXXd mhat = m_[i].array() / bc1;
    Eigen::ArrayXXd vhat = v_[i].array() / bc2;
    values_[i].array() -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
  }
}

void ParamStore::save(std::ostream& out) const {
  std::uint64_t n = values_.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::uint64_t len = names_[i].size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(names_[i].data(), static_cast<std::streamsize>(len));
    std::int64_t r = values_[i].rows(), c = values_[i].cols();
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    out.write(reinterpret_cast<const char*>(&c), sizeof(c));
    out.write(reinterpret_cast<const char*>(values_[i].data()),
              static_cast<std::streamsize>(sizeof(double) * r * c));
  }
}

void ParamStore::load(std::istream& in) {
  names_.clear();
  values_.clear();
  m_.clear();
  v_.clear();
  step_ = 0;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in) throw DataError("parameter blob: truncated header");
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string name(len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(len));
    std::int64_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof(r));
    in.read(reinterpret_cast<char*>(&c), sizeof(c));
    if (!in || r < 0 || c < 0)
      throw DataError("parameter blob: truncated entry '" + name + "'");
    Mat m(r, c);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * r * c));
    if (!in) throw DataError("parameter blob: truncated data for '" + name + "'");
    add(name, std::move(m));
  }
}

}  // namespace pba::ad
