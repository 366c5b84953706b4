// Command-line entry point wiring the assessment toolkit together. One binary
// with subcommands; every artifact-producing step echoes its resolved config
// and a manifest (config digest, input digests, seed) into the run directory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pba/baselines.hpp"
#include "pba/corpus.hpp"
#include "pba/corruption.hpp"
#include "pba/digest.hpp"
#include "pba/eval.hpp"
#include "pba/llm.hpp"
#include "pba/neural.hpp"
#include "pba/systems.hpp"
#include "pba/tokenizer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pba;

namespace {

// ---------------------------------------------------------------- run config

struct RunConfig {
  EncoderConfig encoder;
  TrainConfig train;
  BilstmConfig bilstm;
  double corruption_p = 0.15;
  int corruption_ratio = 3;
  int fold_k = 5;
  std::uint64_t fold_seed = 0;
  bool stratified = true;
  int llm_shots = 0;
  int llm_retries = 2;
  double llm_temperature = 0.0;

  json to_json() const {
    json j;
    j["encoder"] = {{"max_len", encoder.max_len},
                    {"dim", encoder.dim},
                    {"layers", encoder.layers},
                    {"heads", encoder.heads}};
    j["train"] = {{"batch_size", train.batch_size},
                  {"epochs", train.epochs},
                  {"lr", train.lr},
                  {"seed", train.seed},
                  {"class_weights", train.class_weights}};
    j["bilstm"] = {{"embed_dim", bilstm.embed_dim},
                   {"hidden", bilstm.hidden},
                   {"max_len", bilstm.max_len}};
    j["corruption"] = {{"p", corruption_p}, {"ratio", corruption_ratio}};
    j["folds"] = {{"k", fold_k},
                  {"seed", fold_seed},
                  {"stratified", stratified}};
    j["llm"] = {{"shots", llm_shots},
                {"retries", llm_retries},
                {"temperature", llm_temperature}};
    return j;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& ex) {
      throw ConfigError("config file '" + path + "': " + ex.what());
    }
    RunConfig cfg;
    auto get = [](const json& obj, const char* key, auto& slot) {
      if (obj.contains(key)) slot = obj.at(key).get<std::decay_t<decltype(slot)>>();
    };
    if (j.contains("encoder")) {
      const auto& e = j["encoder"];
      get(e, "max_len", cfg.encoder.max_len);
      get(e, "dim", cfg.encoder.dim);
      get(e, "layers", cfg.encoder.layers);
      get(e, "heads", cfg.encoder.heads);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      get(t, "batch_size", cfg.train.batch_size);
      get(t, "epochs", cfg.train.epochs);
      get(t, "lr", cfg.train.lr);
      get(t, "seed", cfg.train.seed);
      get(t, "class_weights", cfg.train.class_weights);
    }
    if (j.contains("bilstm")) {
      const auto& b = j["bilstm"];
      get(b, "embed_dim", cfg.bilstm.embed_dim);
      get(b, "hidden", cfg.bilstm.hidden);
      get(b, "max_len", cfg.bilstm.max_len);
    }
    if (j.contains("corruption")) {
      const auto& c = j["corruption"];
      get(c, "p", cfg.corruption_p);
      get(c, "ratio", cfg.corruption_ratio);
    }
    if (j.contains("folds")) {
      const auto& f = j["folds"];
      get(f, "k", cfg.fold_k);
      get(f, "seed", cfg.fold_seed);
      get(f, "stratified", cfg.stratified);
    }
    if (j.contains("llm")) {
      const auto& l = j["llm"];
      get(l, "shots", cfg.llm_shots);
      get(l, "retries", cfg.llm_retries);
      get(l, "temperature", cfg.llm_temperature);
    }
    return cfg;
  }
};

// ------------------------------------------------------------- run directory

// A run owns its directory; concurrent runs must use distinct ones.
class RunDir {
 public:
  explicit RunDir(const std::string& root) : root_(root) {
    for (const char* sub :
         {"config", "manifests", "data", "checkpoints", "predictions",
          "reports"}) {
      fs::create_directories(root_ / sub);
    }
    lock_ = root_ / ".lock";
    std::FILE* f = std::fopen(lock_.string().c_str(), "wx");
    if (!f)
      throw ConfigError("run directory '" + root + "' is locked by another "
                        "run (remove " + lock_.string() + " if stale)");
    std::fclose(f);
  }
  ~RunDir() {
    std::error_code ec;
    fs::remove(lock_, ec);
  }

  fs::path path(const std::string& rel) const { return root_ / rel; }

  void echo_config(const std::string& step, const RunConfig& cfg) const {
    std::ofstream out(root_ / "config" / (step + ".json"));
    out << cfg.to_json().dump(2) << "\n";
  }

  void write_manifest(const std::string& step, const RunConfig& cfg,
                      const std::vector<fs::path>& inputs,
                      const std::vector<fs::path>& outputs) const {
    json m;
    m["step"] = step;
    m["config_digest"] = hex_digest(cfg.to_json().dump());
    m["seed"] = cfg.train.seed;
    for (const auto& p : inputs)
      m["inputs"][p.filename().string()] = file_digest(p);
    for (const auto& p : outputs)
      m["outputs"][p.filename().string()] = file_digest(p);
    std::ofstream out(root_ / "manifests" / (step + ".json"));
    out << m.dump(2) << "\n";
  }

 private:
  static std::string file_digest(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot digest missing file '" + p.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return hex_digest(buf.str());
  }

  fs::path root_;
  fs::path lock_;
};

// ------------------------------------------------------------------ helpers

std::string fmt_prob(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string probs_json(const std::array<double, 3>& p) {
  return "[" + fmt_prob(p[0]) + ", " + fmt_prob(p[1]) + ", " + fmt_prob(p[2]) +
         "]";
}

std::vector<TokenSequence> tokenize_all(
    const std::vector<LabeledUtterance>& data) {
  std::vector<TokenSequence> out;
  out.reserve(data.size());
  for (const auto& rec : data) out.push_back(tokenize(rec.utterance));
  return out;
}

// ------------------------------------------------------------- subcommands

int cmd_ingest(const RunDir& run, const RunConfig& cfg,
               const std::vector<std::string>& inputs,
               const std::string& format) {
  AlignmentFormat fmt;
  if (format == "interval") fmt = AlignmentFormat::kIntervalTier;
  else if (format == "json") fmt = AlignmentFormat::kJsonWords;
  else throw ConfigError("ingest: unknown format '" + format + "'");

  std::vector<LabeledUtterance> data;
  std::vector<fs::path> in_paths;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest: cannot open '" + path + "'");
    LabeledUtterance rec;
    rec.utterance = parse_alignment(in, fmt, fs::path(path).stem().string());
    rec.validate();
    data.push_back(std::move(rec));
    in_paths.emplace_back(path);
  }
  fs::path out = run.path("data/ingested.jsonl");
  save_dataset(data, out.string());
  run.echo_config("ingest", cfg);
  run.write_manifest("ingest", cfg, in_paths, {out});
  std::cout << "wrote " << data.size() << " utterances to " << out.string()
            << "\n";
  return 0;
}

int cmd_synth(const RunDir& run, const RunConfig& cfg, std::uint64_t seed,
              std::size_t n, const std::string& profile) {
  auto data =
      synthesize_corpus(seed, n, builtin_vocab(), gap_profile_from_name(profile));
  fs::path out = run.path("data/dataset.jsonl");
  save_dataset(data, out.string());
  run.echo_config("synth", cfg);
  run.write_manifest("synth", cfg, {}, {out});
  std::cout << "wrote " << data.size() << " utterances to " << out.string()
            << "\n";
  return 0;
}

int cmd_corrupt(const RunDir& run, const RunConfig& cfg,
                const std::string& in_path) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  std::vector<TokenSequence> seqs;
  for (const auto& rec : data) {
    if (rec.utterance.word_count() >= 2) seqs.push_back(tokenize(rec.utterance));
  }
  if (seqs.empty()) throw DataError("corrupt: no multi-word utterances");
  std::mt19937_64 rng(cfg.train.seed);
  auto records =
      build_pretraining_set(seqs, cfg.corruption_ratio, cfg.corruption_p, rng);
  fs::path out = run.path("data/pretrain.jsonl");
  save_pretraining_set(records, out.string());
  run.echo_config("corrupt", cfg);
  run.write_manifest("corrupt", cfg, {in}, {out});
  std::cout << "wrote " << records.size() << " records to " << out.string()
            << "\n";
  return 0;
}

int cmd_pretrain(const RunDir& run, const RunConfig& cfg,
                 const std::string& in_path) {
  fs::path in = in_path.empty() ? run.path("data/pretrain.jsonl")
                                : fs::path(in_path);
  auto records = load_pretraining_set(in.string());
  Checkpoint ckpt = pretrain_discriminator(records, cfg.encoder, cfg.train);
  fs::path out = run.path("checkpoints/pretrained.bin");
  save_checkpoint(ckpt, out.string());
  run.echo_config("pretrain", cfg);
  run.write_manifest("pretrain", cfg, {in}, {out});
  std::cout << "wrote checkpoint " << out.string() << "\n";
  return 0;
}

int cmd_finetune(const RunDir& run, const RunConfig& cfg,
                 const std::string& in_path, const std::string& init_path,
                 bool fine_grained) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  std::optional<Checkpoint> init;
  std::vector<fs::path> inputs = {in};
  if (!init_path.empty()) {
    fs::path p = init_path == "auto" ? run.path("checkpoints/pretrained.bin")
                                     : fs::path(init_path);
    init = load_checkpoint(p.string());
    inputs.push_back(p);
  }
  const char* step = fine_grained ? "finetune-fine" : "finetune-overall";
  Checkpoint ckpt =
      fine_grained
          ? finetune_fine_grained(data, init ? &*init : nullptr, cfg.encoder,
                                  cfg.train)
          : finetune_overall(data, init ? &*init : nullptr, cfg.encoder,
                             cfg.train);
  fs::path out = run.path(std::string("checkpoints/") +
                          (fine_grained ? "fine_grained.bin" : "overall.bin"));
  save_checkpoint(ckpt, out.string());
  run.echo_config(step, cfg);
  run.write_manifest(step, cfg, inputs, {out});
  std::cout << "wrote checkpoint " << out.string() << "\n";
  return 0;
}

int cmd_baseline_bilstm(const RunDir& run, const RunConfig& cfg,
                        const std::string& in_path, const std::string& mode) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  Checkpoint ckpt;
  if (mode == "overall") {
    ckpt = train_bilstm_overall(data, cfg.bilstm, cfg.train);
  } else if (mode == "crf") {
    ckpt = train_bilstm_crf(data, cfg.bilstm, cfg.train);
  } else {
    throw ConfigError("baseline-bilstm: mode must be overall or crf");
  }
  fs::path out = run.path("checkpoints/bilstm_" + mode + ".bin");
  save_checkpoint(ckpt, out.string());
  run.echo_config("baseline-bilstm", cfg);
  run.write_manifest("baseline-bilstm", cfg, {in}, {out});
  std::cout << "wrote checkpoint " << out.string() << "\n";
  return 0;
}

int cmd_predict(const RunDir& run, const RunConfig& cfg,
                const std::string& ckpt_path, const std::string& in_path) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  fs::path out = run.path("predictions/" + ckpt.stage + ".jsonl");
  std::ofstream os(out);
  for (const auto& rec : data) {
    const std::string& id = rec.utterance.utterance_id;
    if (ckpt.stage == stage::kFinetunedOverall ||
        ckpt.stage == stage::kBilstmOverall) {
      auto [rank, probs] = ckpt.stage == stage::kFinetunedOverall
                               ? predict_overall(ckpt, rec.utterance)
                               : predict_bilstm_overall(ckpt, rec.utterance);
      os << "{\"utterance_id\": \"" << id << "\", \"rank\": " << rank.value()
         << ", \"probs\": " << probs_json(probs) << "}\n";
    } else if (ckpt.stage == stage::kFinetunedFineGrained ||
               ckpt.stage == stage::kBilstmCrf) {
      FineGrainedPrediction pred =
          ckpt.stage == stage::kFinetunedFineGrained
              ? predict_fine_grained(ckpt, rec.utterance)
              : predict_bilstm_crf(ckpt, rec.utterance);
      os << "{\"utterance_id\": \"" << id << "\", \"intervals\": [";
      for (std::size_t i = 0; i < pred.intervals.size(); ++i) {
        const auto& iv = pred.intervals[i];
        if (i) os << ", ";
        os << "{\"index\": " << iv.index << ", \"rank\": " << iv.rank.value()
           << ", \"probs\": " << probs_json(iv.probs) << "}";
      }
      os << "], \"truncated\": " << (pred.truncated ? "true" : "false")
         << "}\n";
    } else if (ckpt.stage == stage::kPretrained) {
      double p = predict_corruption_probability(ckpt, tokenize(rec.utterance));
      os << "{\"utterance_id\": \"" << id
         << "\", \"p_corrupted\": " << fmt_prob(p) << "}\n";
    } else {
      throw DataError("predict: unknown checkpoint stage '" + ckpt.stage + "'");
    }
  }
  os.close();
  run.echo_config("predict", cfg);
  run.write_manifest("predict", cfg, {in, fs::path(ckpt_path)}, {out});
  std::cout << "wrote predictions to " << out.string() << "\n";
  return 0;
}

int cmd_baseline_tts(const RunDir& run, const RunConfig& cfg,
                     const std::string& in_path, const std::string& refs_path) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  auto refs = load_dataset(refs_path);
  std::map<std::string, TokenSequence> by_transcript;
  for (const auto& rec : refs)
    by_transcript.emplace(rec.utterance.transcript, tokenize(rec.utterance));
  fs::path out = run.path("predictions/against_tts.jsonl");
  std::ofstream os(out);
  for (const auto& rec : data) {
    auto it = by_transcript.find(rec.utterance.transcript);
    if (it == by_transcript.end())
      throw DataError("baseline-tts: no reference for transcript of '" +
                      rec.utterance.utterance_id + "'");
    auto [sim, rank] =
        against_tts_score(tokenize(rec.utterance), ReferenceBreaks{it->second});
    os << "{\"utterance_id\": \"" << rec.utterance.utterance_id
       << "\", \"similarity\": " << fmt_prob(sim)
       << ", \"rank\": " << rank.value() << "}\n";
  }
  os.close();
  run.echo_config("baseline-tts", cfg);
  run.write_manifest("baseline-tts", cfg, {in, fs::path(refs_path)}, {out});
  std::cout << "wrote predictions to " << out.string() << "\n";
  return 0;
}

int cmd_llm_assess(const RunDir& run, const RunConfig& cfg,
                   const std::string& in_path, const std::string& cache_path,
                   const std::string& pool_path, bool live) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());

  std::vector<LabeledUtterance> pool;
  if (cfg.llm_shots > 0) {
    if (pool_path.empty())
      throw ConfigError("llm-assess: --shot-pool is required when shots > 0");
    pool = load_dataset(pool_path);
  }

  // The network is only touched behind --live; the default path replays the
  // transcript cache.
  std::unique_ptr<HttpChatClient> http;
  if (live) http = std::make_unique<HttpChatClient>(HttpChatClient::from_env());
  CachedChatClient client(cache_path, live ? http.get() : nullptr);

  fs::path out = run.path("predictions/llm_verdicts.jsonl");
  std::ofstream os(out);
  std::size_t idx = 0;
  for (const auto& rec : data) {
    std::vector<LabeledUtterance> shots;
    if (cfg.llm_shots > 0) {
      std::mt19937_64 rng(cfg.train.seed ^
                          (0x73686f74ULL + idx * 0x9e3779b9ULL));
      shots = select_shots(pool, static_cast<std::size_t>(cfg.llm_shots), rng);
    }
    PromptBundle bundle =
        build_prompt(tokenize(rec.utterance), shots, default_rubric());
    bundle.temperature = cfg.llm_temperature;
    LlmVerdict verdict = assess_with_llm(client, bundle, cfg.llm_retries);
    os << verdict_to_json_line(rec.utterance.utterance_id, verdict) << "\n";
    ++idx;
  }
  os.close();
  run.echo_config("llm-assess", cfg);
  std::vector<fs::path> inputs = {in};
  if (!pool_path.empty()) inputs.emplace_back(pool_path);
  run.write_manifest("llm-assess", cfg, inputs, {out});
  std::cout << "wrote verdicts to " << out.string() << "\n";
  return 0;
}

int cmd_evaluate(const RunDir& run, const RunConfig& cfg,
                 const std::string& in_path, const std::string& system,
                 const std::string& init_path, const std::string& refs_path,
                 const std::string& cache_path) {
  fs::path in = in_path.empty() ? run.path("data/dataset.jsonl")
                                : fs::path(in_path);
  auto data = load_dataset(in.string());
  std::vector<fs::path> inputs = {in};

  std::optional<Checkpoint> init;
  if (system == "break-bert-overall" || system == "break-bert-fine") {
    fs::path p = (init_path.empty() || init_path == "auto")
                     ? run.path("checkpoints/pretrained.bin")
                     : fs::path(init_path);
    init = load_checkpoint(p.string());
    inputs.push_back(p);
  }

  std::unique_ptr<Assessor> assessor;
  std::unique_ptr<CachedChatClient> chat;
  if (system == "bert-overall" || system == "break-bert-overall") {
    assessor = std::make_unique<EncoderOverallAssessor>(std::move(init),
                                                        cfg.encoder, cfg.train);
  } else if (system == "bert-fine" || system == "break-bert-fine") {
    assessor = std::make_unique<EncoderFineGrainedAssessor>(
        std::move(init), cfg.encoder, cfg.train);
  } else if (system == "bilstm-overall") {
    assessor = std::make_unique<BilstmOverallAssessor>(cfg.bilstm, cfg.train);
  } else if (system == "bilstm-crf") {
    assessor = std::make_unique<BilstmCrfAssessor>(cfg.bilstm, cfg.train);
  } else if (system == "against-tts") {
    if (refs_path.empty())
      throw ConfigError("evaluate: against-tts needs --refs");
    auto refs = load_dataset(refs_path);
    inputs.emplace_back(refs_path);
    assessor = std::make_unique<AgainstTtsAssessor>(refs);
  } else if (system == "llm") {
    if (cache_path.empty())
      throw ConfigError("evaluate: the llm system needs --cache (evaluation "
                        "never goes live)");
    chat = std::make_unique<CachedChatClient>(cache_path);
    assessor = std::make_unique<LlmOverallAssessor>(
        *chat, static_cast<std::size_t>(cfg.llm_shots), cfg.train.seed,
        cfg.llm_retries);
  } else {
    throw ConfigError("evaluate: unknown system '" + system + "'");
  }

  FoldPlan plan;
  if (cfg.stratified) {
    std::vector<int> labels;
    for (const auto& rec : data) {
      if (!rec.overall_rank)
        throw DataError("evaluate: '" + rec.utterance.utterance_id +
                        "' has no overall_rank for stratification");
      labels.push_back(rec.overall_rank->value());
    }
    plan = make_stratified_folds(labels, cfg.fold_k, cfg.fold_seed);
  } else {
    plan = make_folds(data.size(), cfg.fold_k, cfg.fold_seed);
  }

  fs::path audit = run.path("predictions/" + assessor->name());
  fs::create_directories(audit);
  MetricReport report = run_cv(data, *assessor, plan, audit.string());

  fs::path out_json = run.path("reports/" + assessor->name() + ".json");
  fs::path out_text = run.path("reports/" + assessor->name() + ".txt");
  {
    std::ofstream js(out_json);
    js << report_to_json(report) << "\n";
    std::ofstream tx(out_text);
    tx << report_to_text(report);
  }
  run.echo_config("evaluate", cfg);
  run.write_manifest("evaluate-" + assessor->name(), cfg, inputs,
                     {out_json, out_text});
  std::cout << report_to_text(report);
  std::cout << "wrote report to " << out_json.string() << "\n";
  return 0;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw DataError("report: cannot open '" + in_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw DataError("report: '" + in_path + "' is not a report: " + ex.what());
  }
  MetricReport report;
  try {
    report.system = j.at("system").get<std::string>();
    auto agg = [&](const char* key) {
      return MetricAggregate{j.at(key).at("mean").get<double>(),
                             j.at(key).at("std").get<double>()};
    };
    report.accuracy = agg("accuracy");
    report.weighted_f1 = agg("weighted_f1");
    report.macro_f1 = agg("macro_f1");
  } catch (const json::exception& ex) {
    throw DataError("report: '" + in_path + "' is not a report: " + ex.what());
  }
  std::cout << report_to_text(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phrase-break assessment toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  // The config file provides defaults; any flag given on the command line
  // overrides it, so it has to be read before CLI11 binds the options.
  RunConfig cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = RunConfig::from_file(argv[i + 1]);
      } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
      }
    }
  }
  std::string config_path, run_dir = "runs/default";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--run", run_dir, "run directory (owned by this run)");
  app.add_option("--max-len", cfg.encoder.max_len, "encoder max input length");
  app.add_option("--dim", cfg.encoder.dim, "encoder hidden size");
  app.add_option("--layers", cfg.encoder.layers, "encoder layers");
  app.add_option("--heads", cfg.encoder.heads, "attention heads");
  app.add_option("--batch-size", cfg.train.batch_size, "training batch size");
  app.add_option("--epochs", cfg.train.epochs, "training epochs");
  app.add_option("--lr", cfg.train.lr, "learning rate");
  app.add_option("--seed", cfg.train.seed, "master seed");
  app.add_flag("--class-weights", cfg.train.class_weights,
               "inverse-frequency class weighting");
  app.add_option("--embed-dim", cfg.bilstm.embed_dim, "bilstm embedding size");
  app.add_option("--hidden", cfg.bilstm.hidden, "bilstm hidden size");
  app.add_option("--p", cfg.corruption_p, "break replacement probability");
  app.add_option("--ratio", cfg.corruption_ratio,
                 "corrupted records per original");
  app.add_option("--folds", cfg.fold_k, "cross-validation folds");
  app.add_option("--fold-seed", cfg.fold_seed, "fold shuffle seed");
  app.add_flag("!--no-stratify", cfg.stratified, "disable stratified folds");
  app.add_option("--shots", cfg.llm_shots, "few-shot context examples (0 or 4)");
  app.add_option("--retries", cfg.llm_retries, "LLM format-retry budget");
  app.add_option("--temperature", cfg.llm_temperature, "LLM temperature");

  // ingest
  std::vector<std::string> ingest_inputs;
  std::string ingest_format = "interval";
  auto* ingest = app.add_subcommand("ingest", "parse alignment files");
  ingest->add_option("files", ingest_inputs, "alignment files")->required();
  ingest->add_option("--format", ingest_format, "interval | json");

  // synth
  std::uint64_t synth_seed = 0;
  std::size_t synth_n = 100;
  std::string synth_profile = "mixed";
  auto* synth = app.add_subcommand("synth", "generate a labeled corpus");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--n", synth_n, "number of utterances");
  synth->add_option("--profile", synth_profile, "fluent | choppy | mixed");

  // corrupt / pretrain / finetune / predict / baselines / llm / evaluate
  std::string in_path, init_path, ckpt_path, refs_path, cache_path, pool_path;
  std::string bilstm_mode = "overall", eval_system;
  bool llm_live = false;

  auto* corrupt_cmd =
      app.add_subcommand("corrupt", "build the pre-training set");
  corrupt_cmd->add_option("--in", in_path, "dataset (default: run data)");

  auto* pretrain = app.add_subcommand("pretrain", "train the discriminator");
  pretrain->add_option("--in", in_path, "pre-training set");

  auto* ft_overall =
      app.add_subcommand("finetune-overall", "train the overall classifier");
  ft_overall->add_option("--in", in_path, "labeled dataset");
  ft_overall->add_option("--init", init_path,
                         "pretrained checkpoint ('auto' = run checkpoint)");

  auto* ft_fine = app.add_subcommand("finetune-fine",
                                     "train the per-interval classifier");
  ft_fine->add_option("--in", in_path, "labeled dataset");
  ft_fine->add_option("--init", init_path,
                      "pretrained checkpoint ('auto' = run checkpoint)");

  auto* predict = app.add_subcommand("predict", "run a checkpoint");
  predict->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  predict->add_option("--in", in_path, "dataset");

  auto* bb = app.add_subcommand("baseline-bilstm", "train a bilstm baseline");
  bb->add_option("--in", in_path, "labeled dataset");
  bb->add_option("--mode", bilstm_mode, "overall | crf");

  auto* bt = app.add_subcommand("baseline-tts",
                                "score against reference readings");
  bt->add_option("--in", in_path, "dataset");
  bt->add_option("--refs", refs_path, "reference dataset")->required();

  auto* llm = app.add_subcommand("llm-assess", "LLM overall assessment");
  llm->add_option("--in", in_path, "dataset");
  llm->add_option("--cache", cache_path, "transcript cache file")->required();
  llm->add_option("--shot-pool", pool_path, "dataset to draw shots from");
  llm->add_flag("--live", llm_live, "forward cache misses to the real backend");

  auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation");
  evaluate->add_option("--in", in_path, "labeled dataset");
  evaluate->add_option("--system", eval_system, "system to evaluate")
      ->required();
  evaluate->add_option("--init", init_path, "pretrained checkpoint");
  evaluate->add_option("--refs", refs_path, "references for against-tts");
  evaluate->add_option("--cache", cache_path, "transcript cache for llm");

  std::string report_in;
  auto* report = app.add_subcommand("report", "render a report JSON as text");
  report->add_option("--in", report_in, "report JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (report->parsed()) return cmd_report(report_in);
    RunDir run(run_dir);
    if (ingest->parsed()) return cmd_ingest(run, cfg, ingest_inputs,
                                            ingest_format);
    if (synth->parsed()) return cmd_synth(run, cfg, synth_seed, synth_n,
                                          synth_profile);
    if (corrupt_cmd->parsed()) return cmd_corrupt(run, cfg, in_path);
    if (pretrain->parsed()) return cmd_pretrain(run, cfg, in_path);
    if (ft_overall->parsed())
      return cmd_finetune(run, cfg, in_path, init_path, false);
    if (ft_fine->parsed())
      return cmd_finetune(run, cfg, in_path, init_path, true);
    if (predict->parsed()) return cmd_predict(run, cfg, ckpt_path, in_path);
    if (bb->parsed()) return cmd_baseline_bilstm(run, cfg, in_path,
                                                 bilstm_mode);
    if (bt->parsed()) return cmd_baseline_tts(run, cfg, in_path, refs_path);
    if (llm->parsed())
      return cmd_llm_assess(run, cfg, in_path, cache_path, pool_path,
                            llm_live);
    if (evaluate->parsed())
      return cmd_evaluate(run, cfg, in_path, eval_system, init_path,
                          refs_path, cache_path);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const DataError& ex) {
    std::cerr << "data error: " << ex.what() << "\n";
    return 3;
  } catch (const NetworkError& ex) {
    std::cerr << "network error: " << ex.what() << "\n";
    return 5;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  }
}
