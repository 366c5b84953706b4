#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pba/types.hpp"

namespace pba {

// Metrics over one gold/pred pairing of 3-class ranks. The F1 convention is
// 0/0 -> 0; classes with zero gold support are flagged.
struct MetricSlice {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  std::array<double, 3> precision{}, recall{}, f1{};
  std::array<int, 3> support{};
  std::array<bool, 3> zero_support{};
};

MetricSlice compute_metrics(const std::vector<Rank>& gold,
                            const std::vector<Rank>& pred);

// Table-4-style collapse: {Poor, Fair} -> inappropriate, {Great} -> appropriate.
struct BinaryMetrics {
  double inappropriate_precision = 0.0;
  double inappropriate_recall = 0.0;
  double appropriate_precision = 0.0;
  double appropriate_recall = 0.0;
};

BinaryMetrics collapse_binary(const std::vector<Rank>& gold,
                              const std::vector<Rank>& pred);

// k disjoint, covering index partitions with sizes differing by at most one.
// Stratification (by overall rank) uses one global rotating fold pointer so
// the size invariant holds across classes.
struct FoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;
};

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);
FoldPlan make_stratified_folds(const std::vector<int>& labels, int k,
                               std::uint64_t seed);

// A system under cross-validated evaluation. Training-free systems
// (against-TTS, LLM) override trainable() to skip the train call.
class Assessor {
 public:
  virtual ~Assessor() = default;
  virtual std::string name() const = 0;
  virtual bool trainable() const { return true; }
  virtual void train(const std::vector<LabeledUtterance>& split) {}
  // Appends aligned gold/pred ranks for one test utterance (one pair for an
  // overall system, one per interval for a fine-grained one).
  virtual void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
                      std::vector<Rank>& pred) = 0;
};

struct MetricAggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population formula over folds
};

struct MetricReport {
  std::string system;
  std::vector<MetricSlice> per_fold;
  std::vector<BinaryMetrics> per_fold_binary;
  MetricAggregate accuracy, weighted_f1, macro_f1;
};

// Trains on k-1 folds, evaluates on the held-out fold, aggregates mean(std)
// per metric. If audit_dir is non-empty, per-fold predictions are persisted
// there as JSONL.
MetricReport run_cv(const std::vector<LabeledUtterance>& dataset,
                    Assessor& system, const FoldPlan& plan,
                    const std::string& audit_dir = "");

std::string report_to_json(const MetricReport& report);
// Plain-text table: percentages with one decimal, "avg(std)" cells.
std::string report_to_text(const MetricReport& report);

}  // namespace pba
