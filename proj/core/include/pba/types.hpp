#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pba/errors.hpp"

namespace pba {

// Assessment rank scale: 1 (Poor), 2 (Fair), 3 (Great).
class Rank {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 3;

  explicit Rank(int value) : value_(value) {
    if (value < kMin || value > kMax)
      throw DataError("rank out of range: " + std::to_string(value));
  }

  int value() const { return value_; }
  const char* name() const {
    switch (value_) {
      case 1: return "Poor";
      case 2: return "Fair";
      default: return "Great";
    }
  }

  bool operator==(const Rank&) const = default;

 private:
  int value_;
};

inline Rank poor() { return Rank(1); }
inline Rank fair() { return Rank(2); }
inline Rank great() { return Rank(3); }

// One force-aligned word with time boundaries in seconds.
struct AlignedWord {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;

  void validate() const {
    if (text.empty()) throw DataError("aligned word with empty text");
    if (text.find_first_of(" \t\n") != std::string::npos)
      throw DataError("aligned word contains whitespace: '" + text + "'");
    if (start_s < 0.0) throw DataError("negative start time for '" + text + "'");
    if (!(end_s > start_s))
      throw DataError("word '" + text + "' has end <= start");
  }
};

// A whole utterance after forced alignment. Words are time-ordered by start;
// overlaps between adjacent words may occur in noisy alignments and are
// resolved downstream (the tokenizer clamps negative gaps).
struct AlignedUtterance {
  std::string utterance_id;
  std::vector<AlignedWord> words;
  std::string transcript;

  std::size_t word_count() const { return words.size(); }

  void validate() const {
    if (words.empty())
      throw DataError("utterance '" + utterance_id + "' has no words");
    for (const auto& w : words) w.validate();
  }
};

// An utterance plus optional human labels: one overall rank and/or one rank
// per inter-word interval (n-1 of them).
struct LabeledUtterance {
  AlignedUtterance utterance;
  std::optional<Rank> overall_rank;
  std::optional<std::vector<Rank>> interval_ranks;

  void validate() const {
    utterance.validate();
    if (interval_ranks &&
        interval_ranks->size() != utterance.word_count() - 1)
      throw DataError("utterance '" + utterance.utterance_id +
                      "': interval_ranks length " +
                      std::to_string(interval_ranks->size()) +
                      " != n-1 = " +
                      std::to_string(utterance.word_count() - 1));
  }
};

}  // namespace pba
