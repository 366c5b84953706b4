#include "pba/baselines.hpp"

#include "doctest.h"
#include "pba/corpus.hpp"

using namespace pba;

namespace {

BilstmConfig tiny_bilstm() {
  BilstmConfig cfg;
  cfg.embed_dim = 12;
  cfg.hidden = 16;
  cfg.max_len = 32;
  return cfg;
}

TrainConfig quick_train(std::uint64_t seed) {
  TrainConfig tc;
  tc.batch_size = 16;
  tc.epochs = 1;
  tc.lr = 1e-3;
  tc.seed = seed;
  return tc;
}

}  // namespace

TEST_CASE("rank_from_similarity thresholds") {
  CHECK(rank_from_similarity(0.0).value() == 1);
  CHECK(rank_from_similarity(0.29).value() == 1);
  CHECK(rank_from_similarity(0.3).value() == 2);
  CHECK(rank_from_similarity(0.69).value() == 2);
  CHECK(rank_from_similarity(0.7).value() == 3);
  CHECK(rank_from_similarity(1.0).value() == 3);
}

TEST_CASE("against_tts_score counts binarized agreement") {
  TokenSequence test({"a", "b", "c", "d", "e"},
                     {BreakToken::br0, BreakToken::br3, BreakToken::br1,
                      BreakToken::br2});
  TokenSequence ref({"a", "b", "c", "d", "e"},
                    {BreakToken::br1, BreakToken::br2, BreakToken::br3,
                     BreakToken::br2});
  // binarized test: 0 1 0 1, ref: 0 1 1 1 -> 3/4 agree
  auto [sim, rank] = against_tts_score(test, ReferenceBreaks{ref});
  CHECK(sim == doctest::Approx(0.75));
  CHECK(rank.value() == 3);
}

TEST_CASE("against_tts_score edge cases") {
  TokenSequence solo({"hello"}, {});
  auto [sim, rank] = against_tts_score(solo, ReferenceBreaks{solo});
  CHECK(sim == 1.0);
  CHECK(rank.value() == 3);

  TokenSequence test({"a", "b"}, {BreakToken::br0});
  TokenSequence ref({"a", "c"}, {BreakToken::br0});
  try {
    against_tts_score(test, ReferenceBreaks{ref});
    FAIL("expected DataError");
  } catch (const DataError& ex) {
    CHECK(std::string(ex.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("bilstm overall trains, predicts and round-trips") {
  auto data = synthesize_corpus(71, 20, builtin_vocab(), GapProfile::kMixed);
  Checkpoint ckpt = train_bilstm_overall(data, tiny_bilstm(), quick_train(2));
  CHECK(ckpt.stage == stage::kBilstmOverall);
  auto [rank, probs] = predict_bilstm_overall(ckpt, data[0].utterance);
  CHECK(probs[0] + probs[1] + probs[2] == doctest::Approx(1.0));
  // wrong predictor for the stage
  CHECK_THROWS_AS(predict_bilstm_crf(ckpt, data[0].utterance), DataError);
}

TEST_CASE("bilstm-crf decodes one rank per interval with marginals") {
  auto data = synthesize_corpus(72, 20, builtin_vocab(), GapProfile::kMixed);
  Checkpoint ckpt = train_bilstm_crf(data, tiny_bilstm(), quick_train(3));
  CHECK(ckpt.stage == stage::kBilstmCrf);
  for (int i = 0; i < 5; ++i) {
    FineGrainedPrediction pred = predict_bilstm_crf(ckpt, data[i].utterance);
    if (!pred.truncated) {
      CHECK(pred.intervals.size() == data[i].utterance.word_count() - 1);
    }
    for (const auto& iv : pred.intervals) {
      CHECK(iv.probs[0] + iv.probs[1] + iv.probs[2] == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("bilstm training is reproducible per seed") {
  auto data = synthesize_corpus(73, 10, builtin_vocab(), GapProfile::kMixed);
  Checkpoint a = train_bilstm_overall(data, tiny_bilstm(), quick_train(4));
  Checkpoint b = train_bilstm_overall(data, tiny_bilstm(), quick_train(4));
  REQUIRE(a.params.count() == b.params.count());
  for (std::size_t i = 0; i < a.params.count(); ++i) {
    CHECK(a.params.value(static_cast<int>(i)) ==
          b.params.value(static_cast<int>(i)));
  }
}
