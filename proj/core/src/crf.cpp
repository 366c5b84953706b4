#include "pba/crf.hpp"

#include <cmath>

#include "pba/errors.hpp"

namespace pba {

using namespace ad;

namespace {

double logsumexp(const Eigen::VectorXd& v) {
  double mx = v.maxCoeff();
  return mx + std::log((v.array() - mx).exp().sum());
}

void check_dims(const Mat& emissions, const CrfParams& crf) {
  Eigen::Index labels = crf.transitions.rows();
  if (crf.transitions.cols() != labels || crf.start.cols() != labels ||
      crf.stop.cols() != labels || emissions.cols() != labels)
    throw DataError("crf: inconsistent label dimensions");
  if (emissions.rows() < 1) throw DataError("crf: empty emission sequence");
}

}  // namespace

double crf_log_partition(const Mat& emissions, const CrfParams& crf) {
  check_dims(emissions, crf);
  Eigen::VectorXd alpha =
      emissions.row(0).transpose() + crf.start.row(0).transpose();
  for (Eigen::Index t = 1; t < emissions.rows(); ++t) {
    Eigen::VectorXd next(alpha.size());
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
      next(j) = logsumexp(alpha + crf.transitions.col(j)) + emissions(t, j);
    alpha = next;
  }
  return logsumexp(alpha + crf.stop.row(0).transpose());
}

double crf_path_score(const Mat& emissions, const CrfParams& crf,
                      const std::vector<int>& path) {
  check_dims(emissions, crf);
  if (static_cast<Eigen::Index>(path.size()) != emissions.rows())
    throw DataError("crf: path length != sequence length");
  double score = crf.start(0, path[0]) + emissions(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t)
    score += crf.transitions(path[t - 1], path[t]) +
             emissions(static_cast<Eigen::Index>(t), path[t]);
  return score + crf.stop(0, path.back());
}

std::pair<std::vector<int>, double> crf_viterbi(const Mat& emissions,
                                                const CrfParams& crf) {
  check_dims(emissions, crf);
  const Eigen::Index labels = crf.transitions.rows();
  const Eigen::Index t_len = emissions.rows();
  Eigen::VectorXd best =
      emissions.row(0).transpose() + crf.start.row(0).transpose();
  Eigen::MatrixXi back(t_len, labels);
  for (Eigen::Index t = 1; t < t_len; ++t) {
    Eigen::VectorXd next(labels);
    for (Eigen::Index j = 0; j < labels; ++j) {
      Eigen::Index argmax = 0;
      (best + crf.transitions.col(j)).maxCoeff(&argmax);
      back(t, j) = static_cast<int>(argmax);
      next(j) = best(argmax) + crf.transitions(argmax, j) + emissions(t, j);
    }
    best = next;
  }
  Eigen::Index last = 0;
  double score = (best + crf.stop.row(0).transpose()).maxCoeff(&last);
  std::vector<int> path(static_cast<std::size_t>(t_len));
  path.back() = static_cast<int>(last);
  for (Eigen::Index t = t_len - 1; t > 0; --t)
    path[static_cast<std::size_t>(t - 1)] =
        back(t, path[static_cast<std::size_t>(t)]);
  return {path, score};
}

Var crf_nll(Var emissions, Var trans, Var start, Var stop,
            const std::vector<int>& gold) {
  const Eigen::Index t_len = emissions.value().rows();
  if (static_cast<Eigen::Index>(gold.size()) != t_len)
    throw DataError("crf_nll: gold length != sequence length");

  // Forward recursion in log space: alpha is a 1 x L row.
  Var alpha = add(rows(emissions, 0, 1), start);
  for (Eigen::Index t = 1; t < t_len; ++t) {
    Var m = add_colvec(trans, transpose(alpha));
    alpha = add(logsumexp_colwise(m), rows(emissions, static_cast<int>(t), 1));
  }
  Var log_z = logsumexp_colwise(transpose(add(alpha, stop)));

  Var gold_score = add(entry(start, 0, gold[0]), entry(emissions, 0, gold[0]));
  for (std::size_t t = 1; t < gold.size(); ++t) {
    gold_score = add(gold_score, entry(trans, gold[t - 1], gold[t]));
    gold_score =
        add(gold_score, entry(emissions, static_cast<int>(t), gold[t]));
  }
  gold_score = add(gold_score, entry(stop, 0, gold.back()));
  return sub(log_z, gold_score);
}

}  // namespace pba
