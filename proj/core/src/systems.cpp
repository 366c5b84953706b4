#include "pba/systems.hpp"

namespace pba {

namespace {

void require_overall(const LabeledUtterance& utt) {
  if (!utt.overall_rank)
    throw DataError("utterance '" + utt.utterance.utterance_id +
                    "' has no overall rank to evaluate against");
}

void require_intervals(const LabeledUtterance& utt) {
  if (!utt.interval_ranks)
    throw DataError("utterance '" + utt.utterance.utterance_id +
                    "' has no interval ranks to evaluate against");
}

}  // namespace

void EncoderOverallAssessor::assess(const LabeledUtterance& utt,
                                    std::vector<Rank>& gold,
                                    std::vector<Rank>& pred) {
  if (!model_) throw DataError("assessor not trained");
  require_overall(utt);
  gold.push_back(*utt.overall_rank);
  pred.push_back(predict_overall(*model_, utt.utterance).first);
}

void EncoderFineGrainedAssessor::assess(const LabeledUtterance& utt,
                                        std::vector<Rank>& gold,
                                        std::vector<Rank>& pred) {
  if (!model_) throw DataError("assessor not trained");
  require_intervals(utt);
  FineGrainedPrediction out = predict_fine_grained(*model_, utt.utterance);
  for (const auto& interval : out.intervals) {
    gold.push_back((*utt.interval_ranks)[static_cast<std::size_t>(
        interval.index)]);
    pred.push_back(interval.rank);
  }
}

void BilstmOverallAssessor::assess(const LabeledUtterance& utt,
                                   std::vector<Rank>& gold,
                                   std::vector<Rank>& pred) {
  if (!model_) throw DataError("assessor not trained");
  require_overall(utt);
  gold.push_back(*utt.overall_rank);
  pred.push_back(predict_bilstm_overall(*model_, utt.utterance).first);
}

void BilstmCrfAssessor::assess(const LabeledUtterance& utt,
                               std::vector<Rank>& gold,
                               std::vector<Rank>& pred) {
  if (!model_) throw DataError("assessor not trained");
  require_intervals(utt);
  FineGrainedPrediction out = predict_bilstm_crf(*model_, utt.utterance);
  for (const auto& interval : out.intervals) {
    gold.push_back((*utt.interval_ranks)[static_cast<std::size_t>(
        interval.index)]);
    pred.push_back(interval.rank);
  }
}

AgainstTtsAssessor::AgainstTtsAssessor(
    const std::vector<LabeledUtterance>& references) {
  for (const auto& ref : references)
    by_transcript_.emplace(ref.utterance.transcript,
                           tokenize(ref.utterance));
}

void AgainstTtsAssessor::assess(const LabeledUtterance& utt,
                                std::vector<Rank>& gold,
                                std::vector<Rank>& pred) {
  require_overall(utt);
  auto ref = by_transcript_.find(utt.utterance.transcript);
  if (ref == by_transcript_.end())
    throw DataError("against-tts: no reference reading for '" +
                    utt.utterance.transcript + "'");
  gold.push_back(*utt.overall_rank);
  pred.push_back(
      against_tts_score(tokenize(utt.utterance), {ref->second}).second);
}

void LlmOverallAssessor::assess(const LabeledUtterance& utt,
                                std::vector<Rank>& gold,
                                std::vector<Rank>& pred) {
  require_overall(utt);
  std::vector<LabeledUtterance> shots;
  if (shots_ > 0) {
    // fresh draw per test example, deterministic in (seed, example index)
    std::mt19937_64 rng(seed_ ^ (0x73686f74ull + example_index_ * 0x9e3779b9ull));
    shots = select_shots(pool_, shots_, rng);
  }
  ++example_index_;
  PromptBundle bundle =
      build_prompt(tokenize(utt.utterance), shots, default_rubric());
  LlmVerdict verdict = assess_with_llm(client_, bundle, retries_);
  gold.push_back(*utt.overall_rank);
  pred.push_back(verdict.rank);
}

}  // namespace pba
