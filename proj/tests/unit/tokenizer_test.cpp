#include "pba/tokenizer.hpp"

#include <limits>
#include <random>

#include "doctest.h"

using namespace pba;

TEST_CASE("bucket_duration boundary semantics") {
  CHECK(bucket_duration(0.005) == BreakToken::br0);
  CHECK(bucket_duration(0.0) == BreakToken::br0);
  CHECK(bucket_duration(-0.030) == BreakToken::br0);  // aligner overlap clamp
  CHECK(bucket_duration(0.010) == BreakToken::br0);
  CHECK(bucket_duration(0.0100001) == BreakToken::br1);
  CHECK(bucket_duration(0.050) == BreakToken::br1);
  CHECK(bucket_duration(0.0501) == BreakToken::br2);
  CHECK(bucket_duration(0.200) == BreakToken::br2);
  CHECK(bucket_duration(0.2001) == BreakToken::br3);
  CHECK(bucket_duration(0.500) == BreakToken::br3);
}

TEST_CASE("bucket_duration rejects non-finite gaps") {
  CHECK_THROWS_AS(bucket_duration(std::numeric_limits<double>::quiet_NaN()),
                  DataError);
  CHECK_THROWS_AS(bucket_duration(std::numeric_limits<double>::infinity()),
                  DataError);
}

TEST_CASE("bucket_duration is monotone and surjective") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-0.2, 1.0);
  bool seen[4] = {};
  for (int i = 0; i < 5000; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a > b) std::swap(a, b);
    CHECK(static_cast<int>(bucket_duration(a)) <=
          static_cast<int>(bucket_duration(b)));
    seen[static_cast<int>(bucket_duration(a))] = true;
  }
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[2]);
  CHECK(seen[3]);
}

TEST_CASE("tokenize interleaves words and bucketed gaps") {
  AlignedUtterance utt{"u1",
                       {{"good", 0.0, 0.30}, {"morning", 0.42, 0.90}},
                       "good morning"};
  TokenSequence seq = tokenize(utt);
  CHECK(seq.token_count() == 3);
  CHECK(seq.words() == std::vector<std::string>{"good", "morning"});
  CHECK(seq.breaks() == std::vector<BreakToken>{BreakToken::br2});
}

TEST_CASE("tokenize of a single word has no breaks") {
  AlignedUtterance utt{"u1", {{"hello", 0.0, 0.5}}, "hello"};
  TokenSequence seq = tokenize(utt);
  CHECK(seq.word_count() == 1);
  CHECK(seq.break_count() == 0);
}

TEST_CASE("tokenize buckets each gap independently") {
  AlignedUtterance utt{"u1",
                       {{"w0", 0.0, 0.1},
                        {"w1", 0.104, 0.2},
                        {"w2", 0.26, 0.4},
                        {"w3", 0.75, 0.9}},
                       ""};
  utt.transcript = "w0 w1 w2 w3";
  TokenSequence seq = tokenize(utt);  // gaps 0.004, 0.06, 0.35
  CHECK(seq.breaks() == std::vector<BreakToken>{BreakToken::br0,
                                                BreakToken::br2,
                                                BreakToken::br3});
  CHECK(seq.token_count() == 7);
}

TEST_CASE("render joins tokens with break literals") {
  TokenSequence seq({"good", "morning"}, {BreakToken::br2});
  CHECK(render(seq) == "good br2 morning");
  CHECK(render(TokenSequence({"hello"}, {})) == "hello");
}

TEST_CASE("words colliding with break literals are escaped") {
  TokenSequence seq({"br2", "morning"}, {BreakToken::br0});
  std::string text = render(seq);
  CHECK(text == "\\br2 br0 morning");
  CHECK(parse_rendered(text) == seq);
}

TEST_CASE("parse_rendered rejects broken alternation") {
  CHECK_THROWS_AS(parse_rendered(""), ParseError);
  CHECK_THROWS_AS(parse_rendered("hello br0"), ParseError);
  CHECK_THROWS_AS(parse_rendered("br0 hello"), ParseError);
  CHECK_THROWS_AS(parse_rendered("a b"), ParseError);  // two adjacent words
}

TEST_CASE("render/parse round-trip on random sequences") {
  std::mt19937_64 rng(42);
  const std::vector<std::string> words = {"a",   "bb",  "river", "br1",
                                          "\\x", "it's", "z9"};
  std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
  std::uniform_int_distribution<int> break_pick(0, 3);
  std::uniform_int_distribution<int> len_pick(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = len_pick(rng);
    std::vector<std::string> ws;
    std::vector<BreakToken> bs;
    for (int i = 0; i < n; ++i) {
      ws.push_back(words[word_pick(rng)]);
      if (i + 1 < n) bs.push_back(static_cast<BreakToken>(break_pick(rng)));
    }
    TokenSequence seq(ws, bs);
    CHECK(parse_rendered(render(seq)) == seq);
  }
}
