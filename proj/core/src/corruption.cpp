#include "pba/corruption.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "pba/errors.hpp"

namespace pba {

using json = nlohmann::json;

CorruptionRecord corrupt(const TokenSequence& seq, double p,
                         std::mt19937_64& rng) {
  if (!(p > 0.0 && p <= 1.0))
    throw ConfigError("corrupt: p must be in (0, 1]");
  if (seq.break_count() == 0)
    throw DataError("uncorruptible: sequence '" + seq.words()[0] +
                    "' has no breaks");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> other(0, 2);

  CorruptionRecord rec{seq, std::vector<bool>(seq.break_count(), false),
                       CorruptionLabel::kCorrupted};
  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < seq.break_count(); ++i) {
      if (unit(rng) < p) {
        int src = static_cast<int>(seq.breaks()[i]);
        int dst = (src + 1 + other(rng)) % kNumBreakKinds;
        rec.sequence.set_break(i, static_cast<BreakToken>(dst));
        rec.replaced_mask[i] = true;
        any = true;
      } else {
        rec.sequence.set_break(i, seq.breaks()[i]);
        rec.replaced_mask[i] = false;
      }
    }
    if (any) break;  // resample until at least one break was replaced
  }
  return rec;
}

std::vector<CorruptionRecord> build_pretraining_set(
    const std::vector<TokenSequence>& originals, int ratio, double p,
    std::mt19937_64& rng) {
  if (originals.empty())
    throw DataError("build_pretraining_set: no original sequences");
  if (ratio < 1) throw ConfigError("build_pretraining_set: ratio must be >= 1");

  std::vector<CorruptionRecord> out;
  out.reserve(originals.size() * (static_cast<std::size_t>(ratio) + 1));
  for (const auto& seq : originals) {
    out.push_back({seq, std::vector<bool>(seq.break_count(), false),
                   CorruptionLabel::kOriginal});
    for (int k = 0; k < ratio; ++k) out.push_back(corrupt(seq, p, rng));
  }
  return out;
}

void write_pretraining_set(const std::vector<CorruptionRecord>& records,
                           std::ostream& out) {
  for (const auto& rec : records) {
    out << "{\"tokens\":" << json(render(rec.sequence)).dump() << ",\"mask\":[";
    for (std::size_t i = 0; i < rec.replaced_mask.size(); ++i) {
      if (i) out << ',';
      out << (rec.replaced_mask[i] ? "true" : "false");
    }
    out << "],\"label\":\""
        << (rec.label == CorruptionLabel::kOriginal ? "original" : "corrupted")
        << "\"}\n";
  }
}

std::vector<CorruptionRecord> read_pretraining_set(
    std::istream& in, const std::string& source_name) {
  std::vector<CorruptionRecord> out;
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
    if (!j.contains("tokens") || !j.contains("mask") || !j.contains("label"))
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": missing one of tokens/mask/label");
    TokenSequence seq = parse_rendered(j["tokens"].get<std::string>());
    std::vector<bool> mask;
    for (const auto& b : j["mask"]) mask.push_back(b.get<bool>());
    if (mask.size() != seq.break_count())
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": mask length != break count");
    std::string label = j["label"].get<std::string>();
    if (label != "original" && label != "corrupted")
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": bad label '" + label + "'");
    bool any = false;
    for (bool b : mask) any = any || b;
    if ((label == "corrupted") != any)
      throw DataError(source_name + ": record " + std::to_string(record) +
                      ": label inconsistent with mask");
    out.push_back({std::move(seq), std::move(mask),
                   label == "original" ? CorruptionLabel::kOriginal
                                       : CorruptionLabel::kCorrupted});
    ++record;
  }
  return out;
}

std::vector<CorruptionRecord> load_pretraining_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pretraining set '" + path + "'");
  return read_pretraining_set(in, path);
}

void save_pretraining_set(const std::vector<CorruptionRecord>& records,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_pretraining_set(records, out);
}

}  // namespace pba
