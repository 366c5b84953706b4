#include "pba/corpus.hpp"

#include <sstream>

#include "doctest.h"
#include "pba/tokenizer.hpp"

using namespace pba;

TEST_CASE("parse_alignment json-words maps fields directly") {
  std::istringstream in(
      R"([{"w":"good","s":0.00,"e":0.30},{"w":"morning","s":0.42,"e":0.90}])");
  AlignedUtterance utt = parse_alignment(in, AlignmentFormat::kJsonWords, "u");
  REQUIRE(utt.word_count() == 2);
  CHECK(utt.words[1].start_s - utt.words[0].end_s == doctest::Approx(0.12));
  CHECK(utt.transcript == "good morning");
}

TEST_CASE("parse_alignment rejects e <= s") {
  std::istringstream in(R"([{"w":"bad","s":0.50,"e":0.50}])");
  CHECK_THROWS_AS(parse_alignment(in, AlignmentFormat::kJsonWords), ParseError);
}

TEST_CASE("parse_alignment interval-tier single word") {
  std::istringstream in("0.10\t0.55\tHello,\n");
  AlignedUtterance utt =
      parse_alignment(in, AlignmentFormat::kIntervalTier, "u");
  REQUIRE(utt.word_count() == 1);
  CHECK(utt.words[0].text == "hello");  // lower-cased, punctuation stripped
}

TEST_CASE("parse_alignment reports the offending line") {
  std::istringstream in("0.0\t0.5\tok\nnot-a-line\n");
  try {
    parse_alignment(in, AlignmentFormat::kIntervalTier);
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(std::string(ex.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_alignment rejects empty input") {
  std::istringstream in("");
  CHECK_THROWS_AS(parse_alignment(in, AlignmentFormat::kIntervalTier),
                  ParseError);
}

TEST_CASE("normalize_word strips surrounding punctuation only") {
  CHECK(normalize_word("Hello,") == "hello");
  CHECK(normalize_word("\"World\"") == "world");
  CHECK(normalize_word("don't") == "don't");
  CHECK(normalize_word("...") == "");
}

TEST_CASE("dataset reader validates records") {
  std::string good =
      R"({"utterance_id":"a","words":[{"w":"x","s":0.0,"e":0.1},{"w":"y","s":0.2,"e":0.3}],"overall_rank":3,"interval_ranks":[2]})"
      "\n";
  std::istringstream ok(good + good + good);
  CHECK(read_dataset(ok, "mem").size() == 3);

  std::string bad =
      R"({"utterance_id":"b","words":[{"w":"x","s":0.0,"e":0.1},{"w":"y","s":0.2,"e":0.3}],"overall_rank":3,"interval_ranks":[2,2]})"
      "\n";
  std::istringstream broken(good + bad);
  try {
    read_dataset(broken, "mem");
    FAIL("expected DataError");
  } catch (const DataError& ex) {
    CHECK(std::string(ex.what()).find("record 1") != std::string::npos);
    CHECK(std::string(ex.what()).find("interval_ranks") != std::string::npos);
  }
}

TEST_CASE("dataset round-trips record for record") {
  auto data = synthesize_corpus(3, 25, builtin_vocab(), GapProfile::kMixed);
  std::ostringstream first;
  write_dataset(data, first);
  std::istringstream back(first.str());
  auto reloaded = read_dataset(back, "mem");
  std::ostringstream second;
  write_dataset(reloaded, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("synthesize_corpus is deterministic in its arguments") {
  std::vector<std::string> vocab = {"a", "b", "c"};
  auto one = synthesize_corpus(7, 5, vocab, GapProfile::kFluent);
  auto two = synthesize_corpus(7, 5, vocab, GapProfile::kFluent);
  std::ostringstream s1, s2;
  write_dataset(one, s1);
  write_dataset(two, s2);
  CHECK(s1.str() == s2.str());
  CHECK(one.size() == 5);
}

TEST_CASE("synthesize_corpus label shapes hold") {
  auto data = synthesize_corpus(11, 50, builtin_vocab(), GapProfile::kMixed);
  for (const auto& rec : data) {
    REQUIRE(rec.interval_ranks.has_value());
    CHECK(rec.interval_ranks->size() == rec.utterance.word_count() - 1);
    CHECK(rec.overall_rank.has_value());
  }
}

TEST_CASE("choppy profile concentrates gaps in br2/br3") {
  auto data = synthesize_corpus(5, 1000, builtin_vocab(), GapProfile::kChoppy);
  std::size_t total = 0, heavy = 0;
  for (const auto& rec : data) {
    TokenSequence seq = tokenize(rec.utterance);
    for (BreakToken b : seq.breaks()) {
      ++total;
      if (static_cast<int>(b) >= 2) ++heavy;
    }
  }
  CHECK(static_cast<double>(heavy) / total >= 0.60);
}

TEST_CASE("synthesize_corpus argument validation") {
  CHECK_THROWS_AS(synthesize_corpus(1, 0, builtin_vocab(), GapProfile::kMixed),
                  ConfigError);
  CHECK_THROWS_AS(synthesize_corpus(1, 5, {}, GapProfile::kMixed),
                  ConfigError);
}
