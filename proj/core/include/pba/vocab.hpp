#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "pba/tokenizer.hpp"

namespace pba {

// Word-piece inventory with four reserved break-token ids. Break tokens are
// atomic: they are never split by the word-piece pass, while words may be.
//
// Fixed ids: 0 [PAD], 1 [CLS], 2 [UNK], 3..6 br0..br3; pieces follow.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kCls = 1;
  static constexpr int kUnk = 2;
  static constexpr int kFirstBreak = 3;

  // Whole words seen in the corpus plus single-character fallback pieces
  // ("x" and continuation "##x").
  static Vocab build(const std::vector<std::vector<std::string>>& word_lists);

  int size() const { return static_cast<int>(pieces_.size()); }
  int break_id(BreakToken b) const {
    return kFirstBreak + static_cast<int>(b);
  }

  // Greedy longest-match word-piece encoding of one word.
  std::vector<int> encode_word(const std::string& word) const;

  const std::vector<std::string>& pieces() const { return pieces_; }

  static Vocab from_pieces(std::vector<std::string> pieces);

 private:
  Vocab() = default;
  void index();

  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> id_;
};

// A token sequence mapped to encoder input ids: [CLS] pieces(w0) br ... with
// right truncation at max_len. break_positions[i] is the input position of
// break i; breaks cut off by truncation are dropped (truncated is set).
struct EncodedSequence {
  std::vector<int> ids;
  std::vector<int> break_positions;
  bool truncated = false;
};

EncodedSequence encode_sequence(const Vocab& vocab, const TokenSequence& seq,
                                int max_len);

}  // namespace pba
