#include "pba/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace pba {

using json = nlohmann::json;

std::string normalize_word(const std::string& raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  auto is_punct = [](unsigned char c) {
    return std::ispunct(c) && c != '\'';  // keep apostrophes (don't, it's)
  };
  while (b < e && is_punct(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && is_punct(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out = raw.substr(b, e - b);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

namespace {

void finalize(AlignedUtterance& utt) {
  if (utt.words.empty())
    throw ParseError("alignment for '" + utt.utterance_id +
                     "' contains no words");
  std::stable_sort(utt.words.begin(), utt.words.end(),
                   [](const AlignedWord& a, const AlignedWord& b) {
                     return a.start_s < b.start_s;
                   });
  std::ostringstream t;
  for (std::size_t i = 0; i < utt.words.size(); ++i) {
    if (i) t << ' ';
    t << utt.words[i].text;
  }
  utt.transcript = t.str();
  utt.validate();
}

AlignedUtterance parse_interval_tier(std::istream& in,
                                     const std::string& utterance_id) {
  AlignedUtterance utt;
  utt.utterance_id = utterance_id;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double s, e;
    std::string word;
    if (!(ls >> s >> e >> word))
      throw ParseError("interval-tier line " + std::to_string(lineno) +
                       ": expected '<start> <end> <word>', got '" + line + "'");
    word = normalize_word(word);
    if (word.empty())
      throw ParseError("interval-tier line " + std::to_string(lineno) +
                       ": word is empty after normalization");
    if (!(e > s))
      throw ParseError("interval-tier line " + std::to_string(lineno) +
                       ": end <= start for word '" + word + "'");
    utt.words.push_back({word, s, e});
  }
  finalize(utt);
  return utt;
}

AlignedUtterance parse_json_words(std::istream& in,
                                  const std::string& utterance_id) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("json-words: ") + ex.what());
  }
  if (!doc.is_array()) throw ParseError("json-words: top level must be an array");
  AlignedUtterance utt;
  utt.utterance_id = utterance_id;
  std::size_t idx = 0;
  for (const auto& w : doc) {
    if (!w.is_object() || !w.contains("w") || !w.contains("s") ||
        !w.contains("e"))
      throw ParseError("json-words: entry " + std::to_string(idx) +
                       " missing one of w/s/e");
    std::string text = normalize_word(w["w"].get<std::string>());
    if (text.empty())
      throw ParseError("json-words: entry " + std::to_string(idx) +
                       ": word empty after normalization");
    double s = w["s"].get<double>();
    double e = w["e"].get<double>();
    if (!(e > s))
      throw ParseError("json-words: entry " + std::to_string(idx) +
                       ": e <= s for word '" + text + "'");
    utt.words.push_back({text, s, e});
    ++idx;
  }
  finalize(utt);
  return utt;
}

}  // namespace

AlignedUtterance parse_alignment(std::istream& stream, AlignmentFormat format,
                                 const std::string& utterance_id) {
  switch (format) {
    case AlignmentFormat::kIntervalTier:
      return parse_interval_tier(stream, utterance_id);
    case AlignmentFormat::kJsonWords:
      return parse_json_words(stream, utterance_id);
  }
  throw ConfigError("unknown alignment format");
}

namespace {

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", s);
  return buf;
}

Rank rank_from_json(const json& j, std::size_t record, const char* field) {
  if (!j.is_number_integer())
    throw DataError("record " + std::to_string(record) + ": field '" + field +
                    "' must be an integer rank");
  int v = j.get<int>();
  if (v < Rank::kMin || v > Rank::kMax)
    throw DataError("record " + std::to_string(record) + ": field '" + field +
                    "' rank out of range: " + std::to_string(v));
  return Rank(v);
}

}  // namespace

std::string record_to_json_line(const LabeledUtterance& rec) {
  std::ostringstream out;
  out << "{\"utterance_id\":" << json(rec.utterance.utterance_id).dump()
      << ",\"words\":[";
  for (std::size_t i = 0; i < rec.utterance.words.size(); ++i) {
    const auto& w = rec.utterance.words[i];
    if (i) out << ',';
    out << "{\"w\":" << json(w.text).dump() << ",\"s\":" << fmt_seconds(w.start_s)
        << ",\"e\":" << fmt_seconds(w.end_s) << '}';
  }
  out << "],\"overall_rank\":";
  if (rec.overall_rank)
    out << rec.overall_rank->value();
  else
    out << "null";
  out << ",\"interval_ranks\":";
  if (rec.interval_ranks) {
    out << '[';
    for (std::size_t i = 0; i < rec.interval_ranks->size(); ++i) {
      if (i) out << ',';
      out << (*rec.interval_ranks)[i].value();
    }
    out << ']';
  } else {
    out << "null";
  }
  out << '}';
  return out.str();
}

void write_dataset(const std::vector<LabeledUtterance>& data,
                   std::ostream& out) {
  for (const auto& rec : data) out << record_to_json_line(rec) << '\n';
}

void save_dataset(const std::vector<LabeledUtterance>& data,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_dataset(data, out);
}

std::vector<LabeledUtterance> read_dataset(std::istream& in,
                                           const std::string& source_name) {
  std::vector<LabeledUtterance> out;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw ParseError(source_name + ": record " + std::to_string(record) +
                       ": " + ex.what());
    }
    LabeledUtterance rec;
    if (!j.contains("utterance_id") || !j["utterance_id"].is_string())
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": field 'utterance_id' missing or not a string");
    rec.utterance.utterance_id = j["utterance_id"].get<std::string>();
    if (!j.contains("words") || !j["words"].is_array() || j["words"].empty())
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": field 'words' missing or empty");
    for (const auto& w : j["words"]) {
      if (!w.is_object() || !w.contains("w") || !w.contains("s") ||
          !w.contains("e"))
        throw DataError(source_name + ": record " + std::to_string(record) +
                        ": field 'words' entry missing one of w/s/e");
      rec.utterance.words.push_back({w["w"].get<std::string>(),
                                     w["s"].get<double>(),
                                     w["e"].get<double>()});
    }
    {
      std::ostringstream t;
      for (std::size_t i = 0; i < rec.utterance.words.size(); ++i) {
        if (i) t << ' ';
        t << rec.utterance.words[i].text;
      }
      rec.utterance.transcript = t.str();
    }
    if (j.contains("overall_rank") && !j["overall_rank"].is_null())
      rec.overall_rank = rank_from_json(j["overall_rank"], record, "overall_rank");
    if (j.contains("interval_ranks") && !j["interval_ranks"].is_null()) {
      if (!j["interval_ranks"].is_array())
        throw DataError(source_name + ": record " + std::to_string(record) +
                        ": field 'interval_ranks' must be an array or null");
      std::vector<Rank> ranks;
      for (const auto& r : j["interval_ranks"])
        ranks.push_back(rank_from_json(r, record, "interval_ranks"));
      rec.interval_ranks = std::move(ranks);
    }
    try {
      rec.validate();
    } catch (const DataError& ex) {
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": " + ex.what());
    }
    out.push_back(std::move(rec));
    ++record;
  }
  return out;
}

std::vector<LabeledUtterance> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(in, path);
}

GapProfile gap_profile_from_name(const std::string& name) {
  if (name == "fluent") return GapProfile::kFluent;
  if (name == "choppy") return GapProfile::kChoppy;
  if (name == "mixed") return GapProfile::kMixed;
  throw ConfigError("unknown gap profile '" + name + "'");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Gap ranges per bucket, chosen strictly inside the bucket boundaries.
constexpr double kGapLo[4] = {0.001, 0.0105, 0.0510, 0.2010};
constexpr double kGapHi[4] = {0.009, 0.0490, 0.1950, 0.8000};

const double* profile_weights(GapProfile p) {
  static const double fluent[4] = {0.45, 0.35, 0.15, 0.05};
  static const double choppy[4] = {0.05, 0.10, 0.35, 0.50};
  static const double mixed[4] = {0.25, 0.25, 0.25, 0.25};
  switch (p) {
    case GapProfile::kFluent: return fluent;
    case GapProfile::kChoppy: return choppy;
    default: return mixed;
  }
}

}  // namespace

const std::vector<std::string>& builtin_vocab() {
  static const std::vector<std::string> vocab = {
      "the",    "quick", "river",  "flows",  "under",  "old",    "stone",
      "bridge", "while", "birds",  "sing",   "softly", "every",  "morning",
      "people", "walk",  "along",  "narrow", "paths",  "toward", "distant",
      "hills",  "where", "sunset", "paints", "golden", "light",  "over",
      "quiet",  "water", "and",    "trees"};
  return vocab;
}

std::vector<LabeledUtterance> synthesize_corpus(
    std::uint64_t seed, std::size_t n_utts,
    const std::vector<std::string>& vocab, GapProfile profile) {
  if (n_utts < 1) throw ConfigError("synthesize_corpus: n_utts must be >= 1");
  if (vocab.empty()) throw ConfigError("synthesize_corpus: empty vocab");

  // Word groups by vocab index mod 4; an utterance with intended bucket g
  // draws its words from group g, so the word choice reflects the rhythm.
  std::vector<std::vector<std::size_t>> groups(4);
  for (std::size_t i = 0; i < vocab.size(); ++i) groups[i % 4].push_back(i);

  const double* weights = profile_weights(profile);
  const char* profile_name = profile == GapProfile::kFluent   ? "fluent"
                             : profile == GapProfile::kChoppy ? "choppy"
                                                              : "mixed";

  std::vector<LabeledUtterance> out;
  out.reserve(n_utts);
  for (std::size_t u = 0; u < n_utts; ++u) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x5bf0'3635ull + u * 0x9e37'79b9ull)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> n_words_dist(5, 12);
    std::uniform_real_distribution<double> word_dur(0.15, 0.50);

    const std::size_t n = static_cast<std::size_t>(n_words_dist(rng));
    LabeledUtterance rec;
    rec.utterance.utterance_id =
        std::string("synth-") + profile_name + "-" + std::to_string(seed) +
        "-" + std::to_string(u);

    auto sample_bucket = [&]() {
      double r = unit(rng);
      for (int g = 0; g < 3; ++g) {
        if (r < weights[g]) return g;
        r -= weights[g];
      }
      return 3;
    };
    // One intended bucket per utterance: the speaker's rhythm for this
    // utterance, drawn from the profile's distribution.
    const int intended = sample_bucket();
    auto pick_word = [&]() -> std::size_t {
      if (groups[intended].empty()) {  // tiny vocab: group may be unpopulated
        std::uniform_int_distribution<std::size_t> any(0, vocab.size() - 1);
        return any(rng);
      }
      std::uniform_int_distribution<std::size_t> in_group(
          0, groups[intended].size() - 1);
      return groups[intended][in_group(rng)];
    };

    double t = 0.0;
    std::vector<Rank> interval_ranks;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t word_idx = pick_word();
      double dur = word_dur(rng);
      rec.utterance.words.push_back({vocab[word_idx], t, t + dur});
      t += dur;
      if (i + 1 < n) {
        int realized = intended;
        if (unit(rng) < 0.2) {
          std::uniform_int_distribution<int> other(0, 2);
          int o = other(rng);
          realized = (intended + 1 + o) % 4;
        }
        std::uniform_real_distribution<double> gap_dist(kGapLo[realized],
                                                        kGapHi[realized]);
        double gap = gap_dist(rng);
        t += gap;
        int diff = std::abs(realized - intended);
        interval_ranks.push_back(diff == 0 ? great() : diff == 1 ? fair()
                                                                 : poor());
      }
    }
    {
      std::ostringstream tr;
      for (std::size_t i = 0; i < rec.utterance.words.size(); ++i) {
        if (i) tr << ' ';
        tr << rec.utterance.words[i].text;
      }
      rec.utterance.transcript = tr.str();
    }
    std::size_t n_poor = 0, n_great = 0;
    for (const auto& r : interval_ranks) {
      if (r == poor()) ++n_poor;
      if (r == great()) ++n_great;
    }
    double total = static_cast<double>(interval_ranks.size());
    if (n_poor > 0.2 * total)
      rec.overall_rank = poor();
    else if (n_great > 0.9 * total)
      rec.overall_rank = great();
    else
      rec.overall_rank = fair();
    rec.interval_ranks = std::move(interval_ranks);
    rec.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pba
