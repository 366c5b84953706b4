#pragma once

#include <map>
#include <string>
#include <vector>

#include "pba/encoder.hpp"
#include "pba/tape.hpp"

namespace pba {

// Training stage tags used by the assessment models.
namespace stage {
inline constexpr const char* kPretrained = "pretrained";
inline constexpr const char* kFinetunedOverall = "finetuned-overall";
inline constexpr const char* kFinetunedFineGrained = "finetuned-fine-grained";
inline constexpr const char* kBilstmOverall = "bilstm-overall";
inline constexpr const char* kBilstmCrf = "bilstm-crf";
}  // namespace stage

// Single-file model container: a JSON config header (format version, stage,
// encoder config, vocabulary, misc hyperparameters) followed by the binary
// parameter payload.
struct Checkpoint {
  std::string stage;
  EncoderConfig encoder;
  std::vector<std::string> vocab_pieces;
  std::map<std::string, double> hyper;
  ad::ParamStore params;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pba
