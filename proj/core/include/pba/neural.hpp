#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pba/checkpoint.hpp"
#include "pba/corruption.hpp"
#include "pba/types.hpp"

namespace pba {

struct TrainConfig {
  int batch_size = 64;
  int epochs = 3;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  bool class_weights = false;  // inverse-frequency re-weighting switch

  void validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("train: lr must be > 0");
  }
};

// Per-break prediction with class probabilities over {Poor, Fair, Great}.
struct IntervalAssessment {
  int index = 0;  // break position i in the utterance
  Rank rank{3};
  std::array<double, 3> probs{};
};

struct FineGrainedPrediction {
  std::vector<IntervalAssessment> intervals;
  bool truncated = false;  // some breaks were cut off at max_len
};

// Replaced-break-token-detection pre-training: binary discriminator over the
// pooled ([CLS]) representation. Builds the word-piece vocabulary from the
// pre-training sequences.
Checkpoint pretrain_discriminator(const std::vector<CorruptionRecord>& records,
                                  const EncoderConfig& enc,
                                  const TrainConfig& tc);

// 3-class sequence classification over the pooled representation. `init`, if
// given, supplies the encoder weights and vocabulary (the discriminator head
// is discarded); otherwise the encoder is freshly initialized and the
// vocabulary is built from `data`.
Checkpoint finetune_overall(const std::vector<LabeledUtterance>& data,
                            const Checkpoint* init, const EncoderConfig& enc,
                            const TrainConfig& tc);

// Per-position 3-class token classification; the loss is computed only at
// break-token positions.
Checkpoint finetune_fine_grained(const std::vector<LabeledUtterance>& data,
                                 const Checkpoint* init,
                                 const EncoderConfig& enc,
                                 const TrainConfig& tc);

std::pair<Rank, std::array<double, 3>> predict_overall(
    const Checkpoint& ckpt, const AlignedUtterance& utt);

FineGrainedPrediction predict_fine_grained(const Checkpoint& ckpt,
                                           const AlignedUtterance& utt);

// P(corrupted) under a pretrained discriminator checkpoint.
double predict_corruption_probability(const Checkpoint& ckpt,
                                      const TokenSequence& seq);

}  // namespace pba
