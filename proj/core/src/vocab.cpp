#include "pba/vocab.hpp"

#include <algorithm>
#include <set>

#include "pba/errors.hpp"

namespace pba {

namespace {
const char* kSpecials[] = {"[PAD]", "[CLS]", "[UNK]", "[br0]",
                           "[br1]", "[br2]", "[br3]"};
constexpr int kNumSpecials = 7;
}  // namespace

void Vocab::index() {
  id_.clear();
  for (int i = 0; i < static_cast<int>(pieces_.size()); ++i)
    id_[pieces_[i]] = i;
}

Vocab Vocab::from_pieces(std::vector<std::string> pieces) {
  if (pieces.size() < kNumSpecials)
    throw DataError("vocab: missing reserved pieces");
  for (int i = 0; i < kNumSpecials; ++i)
    if (pieces[i] != kSpecials[i])
      throw DataError("vocab: reserved piece " + std::to_string(i) +
                      " is '" + pieces[i] + "', expected '" + kSpecials[i] +
                      "'");
  Vocab v;
  v.pieces_ = std::move(pieces);
  v.index();
  return v;
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& word_lists) {
  std::set<std::string> words;
  std::set<char> chars;
  for (const auto& list : word_lists)
    for (const auto& w : list) {
      words.insert(w);
      for (char c : w) chars.insert(c);
    }
  std::vector<std::string> pieces(kSpecials, kSpecials + kNumSpecials);
  for (const auto& w : words) pieces.push_back(w);
  for (char c : chars) {
    std::string s(1, c);
    if (!words.count(s)) pieces.push_back(s);
    pieces.push_back("##" + s);
  }
  Vocab v;
  v.pieces_ = std::move(pieces);
  v.index();
  return v;
}

std::vector<int> Vocab::encode_word(const std::string& word) const {
  auto whole = id_.find(word);
  if (whole != id_.end() && whole->second >= kNumSpecials)
    return {whole->second};
  // Greedy longest-match word-piece; any unmatched character collapses the
  // whole word to [UNK].
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::size_t len = word.size() - pos;
    int match = -1;
    while (len > 0) {
      std::string piece = word.substr(pos, len);
      if (pos > 0) piece = "##" + piece;
      auto it = id_.find(piece);
      if (it != id_.end() && it->second >= kNumSpecials) {
        match = it->second;
        break;
      }
      --len;
    }
    if (match < 0) return {kUnk};
    out.push_back(match);
    pos += len;
  }
  return out;
}

EncodedSequence encode_sequence(const Vocab& vocab, const TokenSequence& seq,
                                int max_len) {
  if (max_len < 2) throw ConfigError("encode_sequence: max_len must be >= 2");
  EncodedSequence enc;
  enc.ids.push_back(Vocab::kCls);
  auto append = [&](int id) {
    if (static_cast<int>(enc.ids.size()) < max_len) {
      enc.ids.push_back(id);
      return true;
    }
    enc.truncated = true;
    return false;
  };
  for (std::size_t i = 0; i < seq.word_count(); ++i) {
    for (int id : vocab.encode_word(seq.words()[i]))
      if (!append(id)) return enc;
    if (i < seq.break_count()) {
      int pos = static_cast<int>(enc.ids.size());
      if (!append(vocab.break_id(seq.breaks()[i]))) return enc;
      enc.break_positions.push_back(pos);
    }
  }
  return enc;
}

}  // namespace pba
