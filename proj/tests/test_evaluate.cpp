#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "citesem/evaluate.hpp"
#include "oracles.hpp"

using namespace citesem;

namespace {

std::vector<Label> labels(const std::vector<int>& v) {
  std::vector<Label> out;
  for (int b : v) out.push_back(b ? Label::positive : Label::negative);
  return out;
}

std::vector<int> random_truth(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    std::vector<int> t(n);
    int pos = 0;
    for (auto& v : t) pos += v = static_cast<int>(rng() % 2);
    if (pos > 0 && pos < static_cast<int>(n)) return t;
  }
}

}  // namespace

TEST(Confusion, AllCorrect) {
  const auto y = labels({1, 0, 1, 1, 0});
  const auto cm = confusion(y, y);
  EXPECT_EQ(cm.fp, 0u);
  EXPECT_EQ(cm.fn, 0u);
  EXPECT_EQ(cm.tp, 3u);
  EXPECT_EQ(cm.tn, 2u);
}

TEST(Confusion, InvertedPredictionsSwapCells) {
  std::mt19937_64 rng(1);
  const auto t = random_truth(rng, 50);
  auto p = random_truth(rng, 50);
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[i] = 1 - p[i];
  const auto a = confusion(labels(p), labels(t)), b = confusion(labels(inv), labels(t));
  EXPECT_EQ(a.tp, b.fn);
  EXPECT_EQ(a.fn, b.tp);
  EXPECT_EQ(a.tn, b.fp);
  EXPECT_EQ(a.fp, b.tn);
}

TEST(Confusion, LengthMismatch) {
  EXPECT_THROW(confusion(labels({1}), labels({1, 0})), DomainError);
}

TEST(Confusion, MatchesRecountOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1000;
    const auto t = random_truth(rng, n), p = random_truth(rng, n);
    const auto cm = confusion(labels(p), labels(t));
    const auto rc = oracle::recount(p, t);
    EXPECT_EQ(cm.tp, rc.tp);
    EXPECT_EQ(cm.fp, rc.fp);
    EXPECT_EQ(cm.fn, rc.fn);
    EXPECT_EQ(cm.tn, rc.tn);
    EXPECT_EQ(cm.positives(), static_cast<std::size_t>(std::count(t.begin(), t.end(), 1)));
    EXPECT_NEAR(sensitivity(cm), static_cast<double>(rc.tp) / static_cast<double>(rc.tp + rc.fn), 1e-15);
    EXPECT_NEAR(specificity(cm), static_cast<double>(rc.tn) / static_cast<double>(rc.tn + rc.fp), 1e-15);
  }
}

TEST(Metrics, DirectFormulas) {
  EXPECT_DOUBLE_EQ(sensitivity({3, 0, 1, 0}), 0.75);
  EXPECT_DOUBLE_EQ(specificity({0, 5, 0, 0}), 0.0);
}

TEST(Metrics, ZeroDenominatorIsAnError) {
  EXPECT_THROW(sensitivity({0, 2, 0, 3}), UndefinedMetricError);
  EXPECT_THROW(specificity({2, 0, 3, 0}), UndefinedMetricError);
}

TEST(Auc, PerfectRankingIsExactlyOne) {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.8, 0.9};
  const auto y = labels({0, 0, 0, 1, 1});
  EXPECT_EQ(roc_and_auc(s, y).auc, 1.0);
  EXPECT_EQ(auc_rank_statistic(s, y), 1.0);
}

TEST(Auc, AllTiedScoresIsOneHalf) {
  const std::vector<double> s(10, 0.4);
  const auto y = labels({0, 1, 0, 1, 1, 0, 0, 1, 0, 1});
  const auto r = roc_and_auc(s, y);
  EXPECT_EQ(r.auc, 0.5);
  ASSERT_EQ(r.points.size(), 2u);  // one diagonal segment
}

TEST(Auc, LabelIndependentScoresNearOneHalf) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 4);
  const auto t = random_truth(rng, 1000);
  std::vector<double> s(1000);
  for (auto& v : s) v = coarse(rng);
  EXPECT_NEAR(roc_and_auc(s, labels(t)).auc, 0.5, 0.05);
}

TEST(Auc, OneClassIsDomainError) {
  const std::vector<double> s{1, 2};
  EXPECT_THROW(roc_and_auc(s, labels({1, 1})), DomainError);
}

TEST(Auc, MatchesPairCountOracle) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    const auto t = random_truth(rng, n);
    std::vector<double> s(n);
    for (auto& v : s) v = trial % 2 ? coarse(rng) : oracle::random_matrix(rng, 1, 1)[0][0];
    const auto y = labels(t);
    const double want = oracle::pair_auc(s, t);
    EXPECT_NEAR(roc_and_auc(s, y).auc, want, 1e-10);
    EXPECT_NEAR(auc_rank_statistic(s, y), want, 1e-10);
  }
}

TEST(Auc, NegatedScoresComplement) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coarse(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_truth(rng, 60);
    std::vector<double> s(60), neg(60);
    for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -(s[i] = coarse(rng));
    EXPECT_NEAR(roc_and_auc(s, labels(t)).auc + roc_and_auc(neg, labels(t)).auc, 1.0, 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_truth(rng, 80);
    auto s = oracle::random_matrix(rng, 1, 80)[0];
    std::vector<double> f(80);
    for (std::size_t i = 0; i < 80; ++i) f[i] = std::exp(3 * s[i]) + 7;
    EXPECT_EQ(roc_and_auc(s, labels(t)).auc, roc_and_auc(f, labels(t)).auc);
  }
}

TEST(Roc, PointsAreMonotoneFromOriginToOne) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coarse(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_truth(rng, 50);
    std::vector<double> s(50);
    for (auto& v : s) v = coarse(rng);
    const auto r = roc_and_auc(s, labels(t));
    EXPECT_EQ(r.points.front().fpr, 0.0);
    EXPECT_EQ(r.points.front().tpr, 0.0);
    EXPECT_EQ(r.points.back().fpr, 1.0);
    EXPECT_EQ(r.points.back().tpr, 1.0);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
      EXPECT_GE(r.points[i].fpr, r.points[i - 1].fpr);
      EXPECT_GE(r.points[i].tpr, r.points[i - 1].tpr);
    }
  }
}

TEST(Roc, BestThresholdSumIsTheBestRocPoint) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_truth(rng, 70);
    const auto s = oracle::random_matrix(rng, 1, 70)[0];
    const auto r = roc_and_auc(s, labels(t));
    double best = 0;
    for (const auto& p : r.points) best = std::max(best, p.tpr + 1 - p.fpr);
    EXPECT_NEAR(best, oracle::best_cut_sum(s, t), 1e-12);
  }
}

TEST(Report, RowFormatAndRoundedSum) {
  auto r = make_report({2, 1, 1, 2});
  r.category = "Bio, Chem";
  r.scheme = Scheme::EHEL;
  r.space = "original";
  r.fvt_variant = "FVT3";
  r.classifier = "kNN";
  r.k = 5;
  r.roc = RocCurve{{}, 0.75};
  std::ostringstream out;
  write_report_header(out);
  write_report_row(out, r);
  EXPECT_EQ(out.str(),
            "category,scheme,space,fvt_variant,classifier,k,dimension,tp,fp,fn,tn,"
            "sensitivity_pct,specificity_pct,sum_pct,auc,best,error\n"
            "\"Bio, Chem\",EHEL,original,FVT3,kNN,5,,2,1,1,2,66.67,66.67,133.34,0.750000,false,\n");
}

TEST(Report, RocCsv) {
  const std::vector<double> s{0.2, 0.8};
  std::ostringstream out;
  write_roc_csv(out, roc_and_auc(s, labels({0, 1})));
  EXPECT_EQ(out.str(), "one_minus_specificity,sensitivity\n0,0\n0,1\n1,1\n");
}
