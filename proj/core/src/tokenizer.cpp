#include "pba/tokenizer.hpp"

#include <cmath>
#include <sstream>

namespace pba {

const char* break_name(BreakToken b) {
  switch (b) {
    case BreakToken::br0: return "br0";
    case BreakToken::br1: return "br1";
    case BreakToken::br2: return "br2";
    default: return "br3";
  }
}

BreakToken break_from_name(const std::string& name) {
  if (name.size() == 3 && name[0] == 'b' && name[1] == 'r' &&
      name[2] >= '0' && name[2] <= '3')
    return static_cast<BreakToken>(name[2] - '0');
  throw ParseError("not a break token: '" + name + "'");
}

BreakToken bucket_duration(double gap_s) {
  if (!std::isfinite(gap_s))
    throw DataError("non-finite gap duration");
  if (gap_s <= 0.010) return BreakToken::br0;  // <=0 clamps here too
  if (gap_s <= 0.050) return BreakToken::br1;
  if (gap_s <= 0.200) return BreakToken::br2;
  return BreakToken::br3;
}

TokenSequence::TokenSequence(std::vector<std::string> words,
                             std::vector<BreakToken> breaks)
    : words_(std::move(words)), breaks_(std::move(breaks)) {
  if (words_.empty()) throw DataError("token sequence needs at least one word");
  if (breaks_.size() != words_.size() - 1)
    throw DataError("token sequence with " + std::to_string(words_.size()) +
                    " words needs " + std::to_string(words_.size() - 1) +
                    " breaks, got " + std::to_string(breaks_.size()));
  for (const auto& w : words_) {
    if (w.empty()) throw DataError("empty word token");
    if (w.find_first_of(" \t\n") != std::string::npos)
      throw DataError("word token contains whitespace: '" + w + "'");
  }
}

TokenSequence tokenize(const AlignedUtterance& utt) {
  utt.validate();
  std::vector<std::string> words;
  words.reserve(utt.words.size());
  for (const auto& w : utt.words) words.push_back(w.text);
  std::vector<BreakToken> breaks;
  breaks.reserve(utt.words.size() - 1);
  for (std::size_t i = 0; i + 1 < utt.words.size(); ++i)
    breaks.push_back(
        bucket_duration(utt.words[i + 1].start_s - utt.words[i].end_s));
  return TokenSequence(std::move(words), std::move(breaks));
}

namespace {

bool is_break_literal(const std::string& w) {
  return w.size() == 3 && w[0] == 'b' && w[1] == 'r' && w[2] >= '0' &&
         w[2] <= '3';
}

std::string escape_word(const std::string& w) {
  if (is_break_literal(w) || (!w.empty() && w[0] == '\\')) return "\\" + w;
  return w;
}

}  // namespace

std::string render(const TokenSequence& seq) {
  std::ostringstream out;
  out << escape_word(seq.words()[0]);
  for (std::size_t i = 0; i < seq.break_count(); ++i)
    out << ' ' << break_name(seq.breaks()[i]) << ' '
        << escape_word(seq.words()[i + 1]);
  return out.str();
}

TokenSequence parse_rendered(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::vector<BreakToken> breaks;
  std::string tok;
  bool expect_word = true;
  while (in >> tok) {
    if (expect_word) {
      if (is_break_literal(tok))
        throw ParseError("expected a word, got break token '" + tok +
                         "' at token " +
                         std::to_string(words.size() + breaks.size()));
      words.push_back(tok[0] == '\\' ? tok.substr(1) : tok);
    } else {
      if (!is_break_literal(tok))
        throw ParseError("expected a break token, got '" + tok +
                         "' at token " +
                         std::to_string(words.size() + breaks.size()));
      breaks.push_back(break_from_name(tok));
    }
    expect_word = !expect_word;
  }
  if (words.empty()) throw ParseError("empty token sequence");
  if (expect_word)
    throw ParseError("token sequence ends with a break token");
  return TokenSequence(std::move(words), std::move(breaks));
}

}  // namespace pba
