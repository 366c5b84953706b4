#pragma once

#include <utility>
#include <vector>

#include "pba/tape.hpp"

namespace pba {

// Linear-chain CRF over a fixed label set with start/stop transition vectors.
// Emissions are (T x L); trans(i, j) scores label i followed by label j.
struct CrfParams {
  ad::Mat transitions;  // L x L
  ad::Mat start;        // 1 x L
  ad::Mat stop;         // 1 x L
};

// Log partition function via the forward algorithm (log-space).
double crf_log_partition(const ad::Mat& emissions, const CrfParams& crf);

// Unnormalized log-score of one label path.
double crf_path_score(const ad::Mat& emissions, const CrfParams& crf,
                      const std::vector<int>& path);

// Best path and its unnormalized log-score.
std::pair<std::vector<int>, double> crf_viterbi(const ad::Mat& emissions,
                                                const CrfParams& crf);

// Differentiable negative log-likelihood of the gold path:
//   nll = logZ - score(gold). trans/start/stop are tape vars so the CRF
// parameters train jointly with the emission network.
ad::Var crf_nll(ad::Var emissions, ad::Var trans, ad::Var start, ad::Var stop,
                const std::vector<int>& gold);

}  // namespace pba
