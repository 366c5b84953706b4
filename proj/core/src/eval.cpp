#include "pba/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace pba {

using json = nlohmann::json;

MetricSlice compute_metrics(const std::vector<Rank>& gold,
                            const std::vector<Rank>& pred) {
  if (gold.empty()) throw DataError("compute_metrics: empty input");
  if (gold.size() != pred.size())
    throw DataError("compute_metrics: gold size " +
                    std::to_string(gold.size()) + " != pred size " +
                    std::to_string(pred.size()));

  int confusion[3][3] = {};
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++confusion[gold[i].value() - 1][pred[i].value() - 1];

  MetricSlice out;
  int correct = 0;
  for (int c = 0; c < 3; ++c) correct += confusion[c][c];
  out.accuracy = static_cast<double>(correct) / gold.size();

  double macro_sum = 0.0, weighted_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    int tp = confusion[c][c];
    int gold_c = confusion[c][0] + confusion[c][1] + confusion[c][2];
    int pred_c = confusion[0][c] + confusion[1][c] + confusion[2][c];
    out.support[c] = gold_c;
    out.zero_support[c] = gold_c == 0;
    out.precision[c] = pred_c > 0 ? static_cast<double>(tp) / pred_c : 0.0;
    out.recall[c] = gold_c > 0 ? static_cast<double>(tp) / gold_c : 0.0;
    double pr = out.precision[c] + out.recall[c];
    out.f1[c] = pr > 0.0 ? 2.0 * out.precision[c] * out.recall[c] / pr : 0.0;
    macro_sum += out.f1[c];
    weighted_sum += gold_c * out.f1[c];
  }
  out.macro_f1 = macro_sum / 3.0;
  out.weighted_f1 = weighted_sum / static_cast<double>(gold.size());
  return out;
}

BinaryMetrics collapse_binary(const std::vector<Rank>& gold,
                              const std::vector<Rank>& pred) {
  if (gold.empty()) throw DataError("collapse_binary: empty input");
  if (gold.size() != pred.size())
    throw DataError("collapse_binary: length mismatch");
  // class 0 = inappropriate (Poor/Fair), class 1 = appropriate (Great)
  int confusion[2][2] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    int g = gold[i] == great() ? 1 : 0;
    int p = pred[i] == great() ? 1 : 0;
    ++confusion[g][p];
  }
  auto prec = [&](int c) {
    int denom = confusion[0][c] + confusion[1][c];
    return denom > 0 ? static_cast<double>(confusion[c][c]) / denom : 0.0;
  };
  auto rec = [&](int c) {
    int denom = confusion[c][0] + confusion[c][1];
    return denom > 0 ? static_cast<double>(confusion[c][c]) / denom : 0.0;
  };
  return {prec(0), rec(0), prec(1), rec(1)};
}

namespace {

FoldPlan assign_folds(std::vector<std::size_t> order, int k,
                      std::uint64_t seed) {
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(k), {});
  std::size_t at = 0;
  for (std::size_t idx : order) {
    plan.folds[at].push_back(idx);
    at = (at + 1) % static_cast<std::size_t>(k);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

}  // namespace

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be >= 2");
  if (n < static_cast<std::size_t>(k))
    throw DataError("make_folds: fewer records than folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return assign_folds(std::move(order), k, seed);
}

FoldPlan make_stratified_folds(const std::vector<int>& labels, int k,
                               std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be >= 2");
  if (labels.size() < static_cast<std::size_t>(k))
    throw DataError("make_folds: fewer records than folds");
  // Group indices by label, shuffle within each group, then deal all groups
  // through one rotating fold pointer.
  std::vector<int> classes;
  for (int l : labels)
    if (std::find(classes.begin(), classes.end(), l) == classes.end())
      classes.push_back(l);
  std::sort(classes.begin(), classes.end());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order;
  for (int cls : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    std::shuffle(members.begin(), members.end(), rng);
    order.insert(order.end(), members.begin(), members.end());
  }
  return assign_folds(std::move(order), k, seed);
}

namespace {

MetricAggregate aggregate(const std::vector<double>& values) {
  MetricAggregate agg;
  double n = static_cast<double>(values.size());
  agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
  agg.stddev = std::sqrt(ss / n);
  return agg;
}

}  // namespace

MetricReport run_cv(const std::vector<LabeledUtterance>& dataset,
                    Assessor& system, const FoldPlan& plan,
                    const std::string& audit_dir) {
  MetricReport report;
  report.system = system.name();
  std::vector<double> accs, wf1s, mf1s;

  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<LabeledUtterance> train_split, test_split;
    for (int f = 0; f < plan.k; ++f)
      for (std::size_t idx : plan.folds[static_cast<std::size_t>(f)])
        (f == fold ? test_split : train_split).push_back(dataset[idx]);

    if (system.trainable()) system.train(train_split);

    std::vector<Rank> gold, pred;
    std::ofstream audit;
    if (!audit_dir.empty()) {
      audit.open(audit_dir + "/fold" + std::to_string(fold) +
                     "_predictions.jsonl",
                 std::ios::binary);
      if (!audit)
        throw DataError("run_cv: cannot write audit file in '" + audit_dir +
                        "'");
    }
    for (const auto& utt : test_split) {
      std::size_t before = gold.size();
      system.assess(utt, gold, pred);
      if (audit.is_open()) {
        json rec;
        rec["utterance_id"] = utt.utterance.utterance_id;
        rec["fold"] = fold;
        json g = json::array(), p = json::array();
        for (std::size_t i = before; i < gold.size(); ++i) {
          g.push_back(gold[i].value());
          p.push_back(pred[i].value());
        }
        rec["gold"] = g;
        rec["pred"] = p;
        audit << rec.dump() << '\n';
      }
    }
    MetricSlice slice = compute_metrics(gold, pred);
    for (int c = 0; c < 3; ++c)
      if (slice.zero_support[c])
        std::cerr << "warning: fold " << fold << " has no gold instances of "
                  << Rank(c + 1).name() << "\n";
    report.per_fold.push_back(slice);
    report.per_fold_binary.push_back(collapse_binary(gold, pred));
    accs.push_back(slice.accuracy);
    wf1s.push_back(slice.weighted_f1);
    mf1s.push_back(slice.macro_f1);
  }
  report.accuracy = aggregate(accs);
  report.weighted_f1 = aggregate(wf1s);
  report.macro_f1 = aggregate(mf1s);
  return report;
}

std::string report_to_json(const MetricReport& report) {
  json j;
  j["system"] = report.system;
  auto agg = [](const MetricAggregate& a) {
    return json{{"mean", a.mean}, {"std", a.stddev}};
  };
  j["accuracy"] = agg(report.accuracy);
  j["weighted_f1"] = agg(report.weighted_f1);
  j["macro_f1"] = agg(report.macro_f1);
  j["folds"] = json::array();
  for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
    const auto& s = report.per_fold[f];
    const auto& b = report.per_fold_binary[f];
    json fj;
    fj["accuracy"] = s.accuracy;
    fj["weighted_f1"] = s.weighted_f1;
    fj["macro_f1"] = s.macro_f1;
    for (int c = 0; c < 3; ++c) {
      json cj;
      cj["precision"] = s.precision[c];
      cj["recall"] = s.recall[c];
      cj["f1"] = s.f1[c];
      cj["support"] = s.support[c];
      fj["classes"][Rank(c + 1).name()] = cj;
    }
    fj["binary"] = {{"inappropriate_precision", b.inappropriate_precision},
                    {"inappropriate_recall", b.inappropriate_recall},
                    {"appropriate_precision", b.appropriate_precision},
                    {"appropriate_recall", b.appropriate_recall}};
    j["folds"].push_back(fj);
  }
  return j.dump(2);
}

std::string report_to_text(const MetricReport& report) {
  auto cell = [](const MetricAggregate& a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f(%.1f)", 100.0 * a.mean,
                  100.0 * a.stddev);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "Assessment Model: " << report.system << "\n";
  out << "Metric avg.(std)\n";
  out << "  Acc.               " << cell(report.accuracy) << "\n";
  out << "  F-Score(weighted)  " << cell(report.weighted_f1) << "\n";
  out << "  F-Score(macro)     " << cell(report.macro_f1) << "\n";
  return out.str();
}

}  // namespace pba
