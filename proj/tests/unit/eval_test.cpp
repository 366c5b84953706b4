#include "pba/eval.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "pba/corpus.hpp"

using namespace pba;

namespace {

// Independent reference implementation built from raw counts.
MetricSlice naive_metrics(const std::vector<Rank>& gold,
                          const std::vector<Rank>& pred) {
  MetricSlice out;
  int correct = 0;
  int tp[3] = {}, fp[3] = {}, fn[3] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    int g = gold[i].value() - 1, p = pred[i].value() - 1;
    if (g == p) {
      ++correct;
      ++tp[g];
    } else {
      ++fn[g];
      ++fp[p];
    }
    ++out.support[g];
  }
  out.accuracy = static_cast<double>(correct) / gold.size();
  double weighted = 0.0, macro = 0.0;
  for (int c = 0; c < 3; ++c) {
    double prec = (tp[c] + fp[c]) ? static_cast<double>(tp[c]) / (tp[c] + fp[c])
                                  : 0.0;
    double rec = (tp[c] + fn[c]) ? static_cast<double>(tp[c]) / (tp[c] + fn[c])
                                 : 0.0;
    double f1 = (prec + rec > 0.0) ? 2.0 * prec * rec / (prec + rec) : 0.0;
    out.precision[c] = prec;
    out.recall[c] = rec;
    out.f1[c] = f1;
    out.zero_support[c] = out.support[c] == 0;
    weighted += f1 * out.support[c];
    macro += f1;
  }
  out.weighted_f1 = weighted / gold.size();
  out.macro_f1 = macro / 3.0;
  return out;
}

std::vector<Rank> random_ranks(std::size_t n, std::mt19937_64& rng) {
  std::vector<Rank> out;
  std::uniform_int_distribution<int> pick(1, 3);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(pick(rng));
  return out;
}

}  // namespace

TEST_CASE("compute_metrics on a worked example") {
  std::vector<Rank> gold = {Rank(1), Rank(1), Rank(2), Rank(3)};
  std::vector<Rank> pred = {Rank(1), Rank(2), Rank(2), Rank(3)};
  MetricSlice m = compute_metrics(gold, pred);
  CHECK(m.accuracy == doctest::Approx(0.75).epsilon(1e-12));
  // class 1: P=1, R=0.5, F1=2/3; class 2: P=0.5, R=1, F1=2/3; class 3: F1=1
  CHECK(m.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.f1[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.f1[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.macro_f1 == doctest::Approx((2.0 / 3.0 + 2.0 / 3.0 + 1.0) / 3.0)
                          .epsilon(1e-12));
  CHECK(m.weighted_f1 ==
        doctest::Approx((2 * 2.0 / 3.0 + 1 * 2.0 / 3.0 + 1 * 1.0) / 4.0)
            .epsilon(1e-12));
}

TEST_CASE("compute_metrics matches the naive implementation") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 40;
    auto gold = random_ranks(n, rng);
    auto pred = random_ranks(n, rng);
    MetricSlice fast = compute_metrics(gold, pred);
    MetricSlice slow = naive_metrics(gold, pred);
    CHECK(fast.accuracy == doctest::Approx(slow.accuracy).epsilon(1e-12));
    CHECK(fast.macro_f1 == doctest::Approx(slow.macro_f1).epsilon(1e-12));
    CHECK(fast.weighted_f1 ==
          doctest::Approx(slow.weighted_f1).epsilon(1e-12));
    for (int c = 0; c < 3; ++c) {
      CHECK(fast.precision[c] ==
            doctest::Approx(slow.precision[c]).epsilon(1e-12));
      CHECK(fast.recall[c] == doctest::Approx(slow.recall[c]).epsilon(1e-12));
      CHECK(fast.f1[c] == doctest::Approx(slow.f1[c]).epsilon(1e-12));
      CHECK(fast.support[c] == slow.support[c]);
      CHECK(fast.zero_support[c] == slow.zero_support[c]);
    }
  }
}

TEST_CASE("compute_metrics flags absent classes and rejects bad input") {
  std::vector<Rank> gold = {Rank(3), Rank(3)};
  std::vector<Rank> pred = {Rank(3), Rank(2)};
  MetricSlice m = compute_metrics(gold, pred);
  CHECK(m.zero_support[0]);
  CHECK(m.zero_support[1]);
  CHECK_FALSE(m.zero_support[2]);
  CHECK(m.f1[0] == 0.0);  // 0/0 convention

  CHECK_THROWS_AS(compute_metrics({}, {}), DataError);
  CHECK_THROWS_AS(compute_metrics({Rank(1)}, {}), DataError);
}

TEST_CASE("collapse_binary groups poor+fair against great") {
  std::vector<Rank> gold = {Rank(1), Rank(2), Rank(3), Rank(3)};
  std::vector<Rank> pred = {Rank(2), Rank(3), Rank(3), Rank(1)};
  BinaryMetrics b = collapse_binary(gold, pred);
  // inappropriate gold {0,1}, pred {0,3}: tp=1
  CHECK(b.inappropriate_precision == doctest::Approx(0.5));
  CHECK(b.inappropriate_recall == doctest::Approx(0.5));
  CHECK(b.appropriate_precision == doctest::Approx(0.5));
  CHECK(b.appropriate_recall == doctest::Approx(0.5));
}

TEST_CASE("make_folds partitions evenly") {
  for (std::size_t n : {5u, 12u, 13u, 100u}) {
    FoldPlan plan = make_folds(n, 5, 99);
    REQUIRE(plan.folds.size() == 5);
    std::set<std::size_t> seen;
    std::size_t lo = n, hi = 0;
    for (const auto& fold : plan.folds) {
      lo = std::min(lo, fold.size());
      hi = std::max(hi, fold.size());
      seen.insert(fold.begin(), fold.end());
    }
    CHECK(seen.size() == n);
    CHECK(*seen.rbegin() == n - 1);
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(make_folds(3, 5, 1), DataError);
  CHECK_THROWS_AS(make_folds(10, 1, 1), ConfigError);
}

TEST_CASE("stratified folds balance classes and keep sizes tight") {
  std::mt19937_64 rng(52);
  std::vector<int> labels;
  for (int i = 0; i < 47; ++i) labels.push_back(1);
  for (int i = 0; i < 31; ++i) labels.push_back(2);
  for (int i = 0; i < 9; ++i) labels.push_back(3);
  std::shuffle(labels.begin(), labels.end(), rng);

  FoldPlan plan = make_stratified_folds(labels, 5, 7);
  std::set<std::size_t> seen;
  std::size_t lo = labels.size(), hi = 0;
  for (const auto& fold : plan.folds) {
    lo = std::min(lo, fold.size());
    hi = std::max(hi, fold.size());
    seen.insert(fold.begin(), fold.end());
    // per-class counts within one of each other across folds
  }
  CHECK(seen.size() == labels.size());
  CHECK(hi - lo <= 1);
  for (int cls : {1, 2, 3}) {
    std::size_t cmin = labels.size(), cmax = 0;
    for (const auto& fold : plan.folds) {
      std::size_t c = 0;
      for (std::size_t idx : fold)
        if (labels[idx] == cls) ++c;
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    CHECK(cmax - cmin <= 1);
  }
}

TEST_CASE("fold plans are deterministic per seed") {
  FoldPlan a = make_folds(40, 5, 11);
  FoldPlan b = make_folds(40, 5, 11);
  FoldPlan c = make_folds(40, 5, 12);
  CHECK(a.folds == b.folds);
  CHECK(a.folds != c.folds);
}

namespace {

// Fixed-answer system for exercising run_cv plumbing.
class ConstantAssessor : public Assessor {
 public:
  std::string name() const override { return "constant"; }
  bool trainable() const override { return false; }
  void assess(const LabeledUtterance& utt, std::vector<Rank>& gold,
              std::vector<Rank>& pred) override {
    gold.push_back(*utt.overall_rank);
    pred.push_back(Rank(2));
  }
};

}  // namespace

TEST_CASE("run_cv aggregates per-fold metrics") {
  auto data = synthesize_corpus(2, 50, builtin_vocab(), GapProfile::kMixed);
  ConstantAssessor sys;
  FoldPlan plan = make_folds(data.size(), 5, 3);
  MetricReport rep = run_cv(data, sys, plan);
  REQUIRE(rep.per_fold.size() == 5);
  double mean = 0.0;
  for (const auto& slice : rep.per_fold) mean += slice.accuracy;
  mean /= 5.0;
  CHECK(rep.accuracy.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(rep.accuracy.stddev >= 0.0);
  CHECK(rep.system == "constant");

  std::string json = report_to_json(rep);
  CHECK(json.find("\"system\": \"constant\"") != std::string::npos);
  std::string text = report_to_text(rep);
  CHECK(text.find("constant") != std::string::npos);
  CHECK(text.find('(') != std::string::npos);  // avg(std) cells
}
