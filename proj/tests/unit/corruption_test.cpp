#include "pba/corruption.hpp"

#include <random>
#include <sstream>

#include "doctest.h"

using namespace pba;

namespace {

TokenSequence make_seq(std::size_t n_words, BreakToken fill) {
  std::vector<std::string> ws;
  std::vector<BreakToken> bs;
  for (std::size_t i = 0; i < n_words; ++i) {
    ws.push_back("w" + std::to_string(i));
    if (i + 1 < n_words) bs.push_back(fill);
  }
  return TokenSequence(ws, bs);
}

}  // namespace

TEST_CASE("corrupt keeps words and flags exactly the replaced breaks") {
  std::mt19937_64 rng(3);
  TokenSequence seq = make_seq(12, BreakToken::br1);
  for (int trial = 0; trial < 200; ++trial) {
    CorruptionRecord rec = corrupt(seq, 0.3, rng);
    CHECK(rec.label == CorruptionLabel::kCorrupted);
    CHECK(rec.sequence.words() == seq.words());
    REQUIRE(rec.replaced_mask.size() == seq.break_count());
    bool any = false;
    for (std::size_t i = 0; i < rec.replaced_mask.size(); ++i) {
      if (rec.replaced_mask[i]) {
        any = true;
        CHECK(rec.sequence.breaks()[i] != seq.breaks()[i]);
      } else {
        CHECK(rec.sequence.breaks()[i] == seq.breaks()[i]);
      }
    }
    CHECK(any);  // zero-replacement draws are resampled
  }
}

TEST_CASE("corrupt replacement rate tracks p") {
  std::mt19937_64 rng(17);
  TokenSequence seq = make_seq(40, BreakToken::br2);
  std::size_t replaced = 0, total = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    CorruptionRecord rec = corrupt(seq, 0.15, rng);
    for (bool f : rec.replaced_mask) {
      ++total;
      if (f) ++replaced;
    }
  }
  double rate = static_cast<double>(replaced) / total;
  CHECK(rate > 0.13);
  CHECK(rate < 0.17);
}

TEST_CASE("corrupt validates its arguments") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(corrupt(TokenSequence({"solo"}, {}), 0.15, rng), DataError);
  TokenSequence seq = make_seq(3, BreakToken::br0);
  CHECK_THROWS_AS(corrupt(seq, 0.0, rng), ConfigError);
  CHECK_THROWS_AS(corrupt(seq, 1.5, rng), ConfigError);
}

TEST_CASE("build_pretraining_set emits ratio corrupted per original") {
  std::mt19937_64 rng(9);
  std::vector<TokenSequence> originals = {make_seq(5, BreakToken::br0),
                                          make_seq(8, BreakToken::br3)};
  auto records = build_pretraining_set(originals, 3, 0.15, rng);
  REQUIRE(records.size() == 8);
  std::size_t original_count = 0;
  for (const auto& rec : records)
    if (rec.label == CorruptionLabel::kOriginal) ++original_count;
  CHECK(original_count == 2);
  // originals carry an all-false mask
  for (const auto& rec : records) {
    if (rec.label == CorruptionLabel::kOriginal) {
      for (bool f : rec.replaced_mask) CHECK_FALSE(f);
    }
  }
}

TEST_CASE("pretraining set round-trips through JSONL") {
  std::mt19937_64 rng(21);
  std::vector<TokenSequence> originals = {make_seq(6, BreakToken::br1),
                                          make_seq(2, BreakToken::br2)};
  auto records = build_pretraining_set(originals, 3, 0.2, rng);
  std::ostringstream out;
  write_pretraining_set(records, out);
  std::istringstream in(out.str());
  auto back = read_pretraining_set(in, "mem");
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].sequence == records[i].sequence);
    CHECK(back[i].replaced_mask == records[i].replaced_mask);
    CHECK(back[i].label == records[i].label);
  }
}

TEST_CASE("reader rejects label/mask contradictions") {
  // labeled original but mask says a break was replaced
  std::istringstream in(
      R"({"tokens":"a br0 b","mask":[true],"label":"original"})"
      "\n");
  CHECK_THROWS_AS(read_pretraining_set(in, "mem"), DataError);

  std::istringstream in2(
      R"({"tokens":"a br0 b","mask":[false,true],"label":"corrupted"})"
      "\n");
  CHECK_THROWS_AS(read_pretraining_set(in2, "mem"), DataError);
}
