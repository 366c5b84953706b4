#include "pba/neural.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "pba/corpus.hpp"
#include "pba/vocab.hpp"

using namespace pba;

namespace {

EncoderConfig tiny_encoder() {
  EncoderConfig enc;
  enc.max_len = 32;
  enc.dim = 16;
  enc.layers = 1;
  enc.heads = 2;
  return enc;
}

TrainConfig quick_train(std::uint64_t seed, int epochs = 2) {
  TrainConfig tc;
  tc.batch_size = 16;
  tc.epochs = epochs;
  tc.lr = 1e-3;
  tc.seed = seed;
  return tc;
}

}  // namespace

TEST_CASE("vocab reserves break ids and splits unknown words") {
  Vocab v = Vocab::build({{"good", "morning"}});
  CHECK(v.break_id(BreakToken::br0) == 3);
  CHECK(v.break_id(BreakToken::br3) == 6);
  CHECK(v.encode_word("good").size() == 1);
  // "god" is not a whole word, so it falls to character pieces
  auto pieces = v.encode_word("god");
  CHECK(pieces.size() == 3);
  for (int id : pieces) CHECK(id >= Vocab::kFirstBreak + 4);
  // characters never seen collapse to a single UNK
  CHECK(v.encode_word("zzz") == std::vector<int>{Vocab::kUnk});
}

TEST_CASE("a word spelled like a break literal is not a break token") {
  Vocab v = Vocab::build({{"br0", "x"}});
  auto ids = v.encode_word("br0");
  REQUIRE(ids.size() == 1);
  CHECK(ids[0] != v.break_id(BreakToken::br0));
}

TEST_CASE("encode_sequence lays out CLS, pieces and breaks") {
  Vocab v = Vocab::build({{"good", "morning"}});
  TokenSequence seq({"good", "morning"}, {BreakToken::br2});
  EncodedSequence enc = encode_sequence(v, seq, 32);
  REQUIRE(enc.ids.size() == 4);  // [CLS] good br2 morning
  CHECK(enc.ids[0] == Vocab::kCls);
  CHECK(enc.ids[2] == v.break_id(BreakToken::br2));
  REQUIRE(enc.break_positions.size() == 1);
  CHECK(enc.break_positions[0] == 2);
  CHECK_FALSE(enc.truncated);
}

TEST_CASE("encode_sequence truncates on the right and drops cut breaks") {
  Vocab v = Vocab::build({{"a", "b", "c", "d"}});
  TokenSequence seq({"a", "b", "c", "d"},
                    {BreakToken::br0, BreakToken::br1, BreakToken::br2});
  EncodedSequence enc = encode_sequence(v, seq, 5);  // [CLS] a br0 b br1
  CHECK(enc.ids.size() == 5);
  CHECK(enc.truncated);
  CHECK(enc.break_positions.size() == 2);
}

TEST_CASE("checkpoint save/load round-trips everything") {
  namespace fs = std::filesystem;
  auto data = synthesize_corpus(41, 12, builtin_vocab(), GapProfile::kMixed);
  Checkpoint ckpt = finetune_overall(data, nullptr, tiny_encoder(),
                                     quick_train(1, 1));
  fs::path path = fs::temp_directory_path() / "pba_ckpt_test.bin";
  save_checkpoint(ckpt, path.string());
  Checkpoint back = load_checkpoint(path.string());
  fs::remove(path);

  CHECK(back.stage == ckpt.stage);
  CHECK(back.vocab_pieces == ckpt.vocab_pieces);
  CHECK(back.encoder.dim == ckpt.encoder.dim);
  CHECK(back.hyper == ckpt.hyper);
  REQUIRE(back.params.count() == ckpt.params.count());
  for (std::size_t i = 0; i < ckpt.params.count(); ++i) {
    CHECK(back.params.value(static_cast<int>(i)) ==
          ckpt.params.value(static_cast<int>(i)));
  }

  // predictions from the reloaded model are identical
  auto [r1, p1] = predict_overall(ckpt, data[0].utterance);
  auto [r2, p2] = predict_overall(back, data[0].utterance);
  CHECK(r1 == r2);
  CHECK(p1 == p2);
}

TEST_CASE("load_checkpoint rejects a non-checkpoint file") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "pba_not_a_ckpt.bin";
  {
    std::ofstream out(path);
    out << "definitely not a checkpoint";
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), DataError);
  fs::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path.string()), DataError);  // missing file
}

TEST_CASE("training is bit-reproducible per seed") {
  auto data = synthesize_corpus(42, 10, builtin_vocab(), GapProfile::kMixed);
  Checkpoint a = finetune_overall(data, nullptr, tiny_encoder(),
                                  quick_train(7, 1));
  Checkpoint b = finetune_overall(data, nullptr, tiny_encoder(),
                                  quick_train(7, 1));
  REQUIRE(a.params.count() == b.params.count());
  for (std::size_t i = 0; i < a.params.count(); ++i) {
    CHECK(a.params.value(static_cast<int>(i)) ==
          b.params.value(static_cast<int>(i)));
  }
}

TEST_CASE("pretraining produces a working discriminator checkpoint") {
  auto data = synthesize_corpus(43, 30, builtin_vocab(), GapProfile::kMixed);
  std::vector<TokenSequence> seqs;
  for (const auto& rec : data) seqs.push_back(tokenize(rec.utterance));
  std::mt19937_64 rng(43);
  auto records = build_pretraining_set(seqs, 3, 0.15, rng);
  Checkpoint ckpt = pretrain_discriminator(records, tiny_encoder(),
                                           quick_train(5, 1));
  CHECK(ckpt.stage == stage::kPretrained);
  double p = predict_corruption_probability(ckpt, seqs[0]);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
  // wrong-stage checkpoints are refused by the other predictors
  CHECK_THROWS_AS(predict_overall(ckpt, data[0].utterance), DataError);
  CHECK_THROWS_AS(predict_fine_grained(ckpt, data[0].utterance), DataError);
}

TEST_CASE("finetune_overall initialized from a pretrained encoder") {
  auto data = synthesize_corpus(44, 24, builtin_vocab(), GapProfile::kMixed);
  std::vector<TokenSequence> seqs;
  for (const auto& rec : data) seqs.push_back(tokenize(rec.utterance));
  std::mt19937_64 rng(44);
  auto records = build_pretraining_set(seqs, 3, 0.15, rng);
  Checkpoint pre = pretrain_discriminator(records, tiny_encoder(),
                                          quick_train(5, 1));
  Checkpoint fin = finetune_overall(data, &pre, tiny_encoder(),
                                    quick_train(6, 1));
  CHECK(fin.stage == stage::kFinetunedOverall);
  CHECK(fin.vocab_pieces == pre.vocab_pieces);  // vocabulary carried over
  auto [rank, probs] = predict_overall(fin, data[0].utterance);
  CHECK(probs[0] + probs[1] + probs[2] == doctest::Approx(1.0));
}

TEST_CASE("fine-grained predictions cover every interval") {
  auto data = synthesize_corpus(45, 20, builtin_vocab(), GapProfile::kMixed);
  Checkpoint ckpt = finetune_fine_grained(data, nullptr, tiny_encoder(),
                                          quick_train(8, 1));
  CHECK(ckpt.stage == stage::kFinetunedFineGrained);
  for (int i = 0; i < 5; ++i) {
    FineGrainedPrediction pred = predict_fine_grained(ckpt, data[i].utterance);
    if (!pred.truncated) {
      CHECK(pred.intervals.size() == data[i].utterance.word_count() - 1);
    }
    for (const auto& iv : pred.intervals) {
      CHECK(iv.probs[0] + iv.probs[1] + iv.probs[2] == doctest::Approx(1.0));
      int arg = 0;
      for (int c = 1; c < 3; ++c)
        if (iv.probs[c] > iv.probs[arg]) arg = c;
      CHECK(iv.rank.value() == arg + 1);
    }
  }
}

TEST_CASE("train config validation") {
  auto data = synthesize_corpus(46, 4, builtin_vocab(), GapProfile::kMixed);
  TrainConfig bad = quick_train(1);
  bad.epochs = 0;
  CHECK_THROWS_AS(finetune_overall(data, nullptr, tiny_encoder(), bad),
                  ConfigError);
  CHECK_THROWS_AS(
      finetune_overall({}, nullptr, tiny_encoder(), quick_train(1)),
      DataError);
}
