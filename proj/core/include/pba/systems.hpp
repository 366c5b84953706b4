#pragma once

// Adapters exposing every assessment system through the eval::Assessor
// interface so the cross-validation harness treats them uniformly.

#include <map>
#include <memory>
#include <optional>

#include "pba/baselines.hpp"
#include "pba/eval.hpp"
#include "pba/llm.hpp"
#include "pba/neural.hpp"

namespace pba {

// Transformer classifier for overall ranks; optionally initialized from a
// pretrained discriminator checkpoint.
class EncoderOverallAssessor : public Assessor {
 public:
  EncoderOverallAssessor(std::optional<Checkpoint> init, EncoderConfig enc,
                         TrainConfig tc)
      : init_(std::move(init)), enc_(enc), tc_(tc) {}
  std::string name() const override {
    return init_ ? "break-bert-overall" : "bert-overall";
  }
  void train(const std::vector<LabeledUtterance>& split) override {
    model_ = finetune_overall(split, init_ ? &*init_ : nullptr, enc_, tc_);
  }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  std::optional<Checkpoint> init_;
  EncoderConfig enc_;
  TrainConfig tc_;
  std::optional<Checkpoint> model_;
};

class EncoderFineGrainedAssessor : public Assessor {
 public:
  EncoderFineGrainedAssessor(std::optional<Checkpoint> init, EncoderConfig enc,
                             TrainConfig tc)
      : init_(std::move(init)), enc_(enc), tc_(tc) {}
  std::string name() const override {
    return init_ ? "break-bert-fine" : "bert-fine";
  }
  void train(const std::vector<LabeledUtterance>& split) override {
    model_ =
        finetune_fine_grained(split, init_ ? &*init_ : nullptr, enc_, tc_);
  }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  std::optional<Checkpoint> init_;
  EncoderConfig enc_;
  TrainConfig tc_;
  std::optional<Checkpoint> model_;
};

class BilstmOverallAssessor : public Assessor {
 public:
  BilstmOverallAssessor(BilstmConfig cfg, TrainConfig tc)
      : cfg_(cfg), tc_(tc) {}
  std::string name() const override { return "bilstm-overall"; }
  void train(const std::vector<LabeledUtterance>& split) override {
    model_ = train_bilstm_overall(split, cfg_, tc_);
  }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  BilstmConfig cfg_;
  TrainConfig tc_;
  std::optional<Checkpoint> model_;
};

class BilstmCrfAssessor : public Assessor {
 public:
  BilstmCrfAssessor(BilstmConfig cfg, TrainConfig tc) : cfg_(cfg), tc_(tc) {}
  std::string name() const override { return "bilstm-crf"; }
  void train(const std::vector<LabeledUtterance>& split) override {
    model_ = train_bilstm_crf(split, cfg_, tc_);
  }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  BilstmConfig cfg_;
  TrainConfig tc_;
  std::optional<Checkpoint> model_;
};

// Training-free: compares each utterance's break pattern against an offline
// reference reading of the same text, keyed by transcript.
class AgainstTtsAssessor : public Assessor {
 public:
  explicit AgainstTtsAssessor(const std::vector<LabeledUtterance>& references);
  std::string name() const override { return "against-tts"; }
  bool trainable() const override { return false; }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  std::map<std::string, TokenSequence> by_transcript_;
};

// Training-free zero/few-shot LLM assessment of overall ranks. Shots are
// redrawn per test utterance from the provided pool (the training split).
class LlmOverallAssessor : public Assessor {
 public:
  LlmOverallAssessor(ChatClient& client, std::size_t shots,
                     std::uint64_t seed, int retries = 2)
      : client_(client), shots_(shots), seed_(seed), retries_(retries) {}
  std::string name() const override {
    return shots_ ? "llm-few-shot" : "llm-zero-shot";
  }
  bool trainable() const override { return shots_ > 0; }
  void train(const std::vector<LabeledUtterance>& split) override {
    pool_ = split;
  }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override;

 private:
  ChatClient& client_;
  std::size_t shots_;
  std::uint64_t seed_;
  int retries_;
  std::vector<LabeledUtterance> pool_;
  std::size_t example_index_ = 0;
};

}  // namespace pba
