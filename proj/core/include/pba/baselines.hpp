#pragma once

#include <utility>
#include <vector>

#include "pba/checkpoint.hpp"
#include "pba/neural.hpp"
#include "pba/tokenizer.hpp"
#include "pba/types.hpp"

namespace pba {

struct BilstmConfig {
  int embed_dim = 64;
  int hidden = 1024;
  int max_len = 128;  // input tokens, same truncation rule as the encoder

  void validate() const {
    if (embed_dim < 1 || hidden < 1)
      throw ConfigError("bilstm: embed_dim and hidden must be positive");
    if (max_len < 2) throw ConfigError("bilstm: max_len must be >= 2");
  }
};

// Bi-LSTM + linear head, 3-class overall classification (mean-pooled states).
Checkpoint train_bilstm_overall(const std::vector<LabeledUtterance>& data,
                                const BilstmConfig& cfg,
                                const TrainConfig& tc);

// Bi-LSTM + linear-chain CRF over break positions; trains by maximizing the
// sequence log-likelihood (forward algorithm), decodes with Viterbi.
Checkpoint train_bilstm_crf(const std::vector<LabeledUtterance>& data,
                            const BilstmConfig& cfg, const TrainConfig& tc);

std::pair<Rank, std::array<double, 3>> predict_bilstm_overall(
    const Checkpoint& ckpt, const AlignedUtterance& utt);

// Ranks from the Viterbi path; probabilities are per-position CRF marginals.
FineGrainedPrediction predict_bilstm_crf(const Checkpoint& ckpt,
                                         const AlignedUtterance& utt);

// --- against-TTS baseline ---

// Break pattern of a native/TTS reading of the same text.
struct ReferenceBreaks {
  TokenSequence sequence;
};

// Fraction of intervals whose binarized break class (br0/br1 -> no break,
// br2/br3 -> break) agrees between test and reference, thresholded into a
// rank: [0, 0.3) Poor, [0.3, 0.7) Fair, [0.7, 1.0] Great. A single-word
// utterance scores 1.0 / Great. Throws on diverging word sequences.
std::pair<double, Rank> against_tts_score(const TokenSequence& test,
                                          const ReferenceBreaks& ref);

Rank rank_from_similarity(double similarity);

}  // namespace pba
