#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pba/types.hpp"

namespace pba {

// The four break-duration buckets. The numeric value doubles as a severity
// ordering: br0 = no break ... br3 = long break.
enum class BreakToken : int { br0 = 0, br1 = 1, br2 = 2, br3 = 3 };

constexpr int kNumBreakKinds = 4;

const char* break_name(BreakToken b);
BreakToken break_from_name(const std::string& name);

// Maps an inter-word gap (seconds) to its bucket:
//   gap <= 0.010 -> br0, (0.010, 0.050] -> br1, (0.050, 0.200] -> br2,
//   gap > 0.200 -> br3.
// Negative gaps (aligner overlaps) clamp into br0. Non-finite gaps throw.
BreakToken bucket_duration(double gap_s);

// Interleaved words and break tokens: w_0 b_0 w_1 ... w_{n-1}. Always starts
// and ends with a word; rendered length is 2n-1 tokens.
class TokenSequence {
 public:
  TokenSequence(std::vector<std::string> words, std::vector<BreakToken> breaks);

  std::size_t word_count() const { return words_.size(); }
  std::size_t break_count() const { return breaks_.size(); }
  std::size_t token_count() const { return 2 * words_.size() - 1; }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<BreakToken>& breaks() const { return breaks_; }

  void set_break(std::size_t i, BreakToken b) { breaks_.at(i) = b; }

  bool operator==(const TokenSequence&) const = default;

 private:
  std::vector<std::string> words_;
  std::vector<BreakToken> breaks_;
};

// Buckets every inter-word gap of the utterance into a break token.
TokenSequence tokenize(const AlignedUtterance& utt);

// Space-joined textual form, break tokens rendered literally as "br0".."br3".
// A word that would collide with a break-token literal (or that starts with a
// backslash) is escaped with a leading backslash, keeping render/parse
// bijective.
std::string render(const TokenSequence& seq);

// Inverse of render. Throws ParseError on broken alternation or empty input.
TokenSequence parse_rendered(const std::string& text);

}  // namespace pba
