#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "pba/tokenizer.hpp"

namespace pba {

enum class CorruptionLabel { kOriginal, kCorrupted };

// A token sequence together with the record of which breaks were replaced.
// Word tokens are always identical to the source sequence.
struct CorruptionRecord {
  TokenSequence sequence;
  std::vector<bool> replaced_mask;  // one flag per break
  CorruptionLabel label = CorruptionLabel::kOriginal;
};

// Replaces each break independently with probability p, drawing the
// replacement uniformly from the three other kinds. Draws with zero
// replacements are resampled from scratch so a corrupted record always has at
// least one replaced break. Throws on a breakless (single-word) sequence.
CorruptionRecord corrupt(const TokenSequence& seq, double p,
                         std::mt19937_64& rng);

// Emits, per original, one record labeled original plus `ratio` corrupted
// records. Output size is (ratio+1) * |originals|.
std::vector<CorruptionRecord> build_pretraining_set(
    const std::vector<TokenSequence>& originals, int ratio, double p,
    std::mt19937_64& rng);

// JSONL: {"tokens": rendered string, "mask": [bool], "label": "original"|"corrupted"}
void write_pretraining_set(const std::vector<CorruptionRecord>& records,
                           std::ostream& out);
std::vector<CorruptionRecord> read_pretraining_set(
    std::istream& in, const std::string& source_name);
std::vector<CorruptionRecord> load_pretraining_set(const std::string& path);
void save_pretraining_set(const std::vector<CorruptionRecord>& records,
                          const std::string& path);

}  // namespace pba
