#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pba/types.hpp"

namespace pba {

enum class AlignmentFormat {
  kIntervalTier,  // plain text, one "<start>\t<end>\t<word>" per line
  kJsonWords,     // JSON array of {"w": str, "s": float, "e": float}
};

// Lower-cases a word and strips surrounding (not internal) punctuation.
// Returns an empty string for pure-punctuation input.
std::string normalize_word(const std::string& raw);

// Parses one forced-alignment artifact into an utterance. Words are sorted by
// start time; the transcript is the space-joined normalized words.
AlignedUtterance parse_alignment(std::istream& stream, AlignmentFormat format,
                                 const std::string& utterance_id = "utt");

// Canonical dataset I/O. One JSON record per line:
//   {"utterance_id": str, "words": [{"w","s","e"}],
//    "overall_rank": 1|2|3|null, "interval_ranks": [1|2|3]|null}
std::vector<LabeledUtterance> load_dataset(const std::string& path);
std::vector<LabeledUtterance> read_dataset(std::istream& in,
                                           const std::string& source_name);
void save_dataset(const std::vector<LabeledUtterance>& data,
                  const std::string& path);
void write_dataset(const std::vector<LabeledUtterance>& data,
                   std::ostream& out);
std::string record_to_json_line(const LabeledUtterance& rec);

enum class GapProfile { kFluent, kChoppy, kMixed };

GapProfile gap_profile_from_name(const std::string& name);

// Deterministic synthetic corpus generator; doubles as a ground-truth oracle.
//
// Each utterance carries one intended break bucket (its rhythm), drawn from
// the profile's distribution. Words are picked from the vocabulary group
// matching that bucket (group g = index-in-vocab mod 4); every interval
// realizes the intended bucket with probability 0.8 (otherwise a uniformly
// random other bucket) and samples a gap inside the realized bucket. Labels
// come from |realized - intended|: 0 -> Great, 1 -> Fair, otherwise Poor.
// Overall rank: Poor if >20% of intervals are Poor, Great if >90% are Great,
// else Fair.
std::vector<LabeledUtterance> synthesize_corpus(
    std::uint64_t seed, std::size_t n_utts,
    const std::vector<std::string>& vocab, GapProfile profile);

// A small built-in vocabulary (32 words) for synth runs without a word list.
const std::vector<std::string>& builtin_vocab();

}  // namespace pba
