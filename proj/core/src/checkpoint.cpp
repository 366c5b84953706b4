#include "pba/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "pba/errors.hpp"

namespace pba {

using json = nlohmann::json;

namespace {
constexpr char kMagic[8] = {'P', 'B', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;
}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json header;
  header["format_version"] = kFormatVersion;
  header["stage"] = ckpt.stage;
  header["encoder"] = {
      {"max_len", ckpt.encoder.max_len},
      {"dim", ckpt.encoder.dim},
      {"layers", ckpt.encoder.layers},
      {"heads", ckpt.encoder.heads},
      {"scale", ckpt.encoder.scale == EncoderScale::kToy ? "toy"
                                                         : "pretrained-adapter"},
  };
  header["vocab"] = ckpt.vocab_pieces;
  header["hyper"] = ckpt.hyper;
  std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  std::uint64_t len = hs.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  ckpt.params.save(out);
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8))
    throw DataError("'" + path + "' is not a checkpoint file");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string hs(len, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("checkpoint '" + path + "': truncated header");
  json header;
  try {
    header = json::parse(hs);
  } catch (const json::parse_error& ex) {
    throw DataError("checkpoint '" + path + "': bad header: " + ex.what());
  }
  if (header.value("format_version", -1) != kFormatVersion)
    throw DataError("checkpoint '" + path + "': unsupported format version");

  Checkpoint ckpt;
  ckpt.stage = header["stage"].get<std::string>();
  const auto& e = header["encoder"];
  ckpt.encoder.max_len = e["max_len"].get<int>();
  ckpt.encoder.dim = e["dim"].get<int>();
  ckpt.encoder.layers = e["layers"].get<int>();
  ckpt.encoder.heads = e["heads"].get<int>();
  ckpt.encoder.scale = e["scale"].get<std::string>() == "toy"
                           ? EncoderScale::kToy
                           : EncoderScale::kPretrainedAdapter;
  ckpt.vocab_pieces = header["vocab"].get<std::vector<std::string>>();
  if (header.contains("hyper"))
    ckpt.hyper = header["hyper"].get<std::map<std::string, double>>();
  ckpt.params.load(in);
  return ckpt;
}

}  // namespace pba
