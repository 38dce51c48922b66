#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "linkassess/metrics.hpp"
#include "linkassess/random.hpp"
#include "oracles.hpp"

using namespace linkassess;

namespace {

std::vector<int> random_labels(Rng& rng, std::size_t n, double p1 = 0.5) {
  std::vector<int> y(n);
  for (auto& v : y) v = rng.uniform01() < p1 ? 1 : 0;
  return y;
}

}  // namespace

TEST(Confusion, Examples) {
  std::vector<int> t = {1, 1, 0, 0};
  auto a = confusion(t, t);
  EXPECT_EQ(a.tp, 2u);
  EXPECT_EQ(a.tn, 2u);
  EXPECT_EQ(a.fp + a.fn, 0u);
  auto b = confusion(std::vector<int>{1, 0, 1, 0}, t);
  EXPECT_EQ(b.tp, 1u);
  EXPECT_EQ(b.fn, 1u);
  EXPECT_EQ(b.fp, 1u);
  EXPECT_EQ(b.tn, 1u);
  auto c = confusion(std::vector<int>(5, 0), std::vector<int>(5, 1));
  EXPECT_EQ(c.fn, 5u);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), InvalidArgument);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
  EXPECT_THROW(confusion(std::vector<int>{2}, std::vector<int>{1}), InvalidArgument);
}

TEST(Weighted, Examples) {
  std::vector<int> t = {1, 1, 0, 0};
  auto perfect = weighted_metrics(t, t);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f, 1.0);

  auto half = weighted_metrics(std::vector<int>{1, 0, 1, 0}, t);
  EXPECT_DOUBLE_EQ(half.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(half.precision, 0.5);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);
  EXPECT_DOUBLE_EQ(half.f, 0.5);

  std::vector<int> truth(10, 0);
  truth[9] = 1;
  auto imb = weighted_metrics(std::vector<int>(10, 0), truth);
  EXPECT_DOUBLE_EQ(imb.accuracy, 0.9);
  EXPECT_DOUBLE_EQ(imb.recall, 0.9);
  EXPECT_DOUBLE_EQ(imb.precision, 0.81);
  EXPECT_TRUE(imb.zero_division);
}

TEST(Weighted, MatchesPerClassLoopOracleAndIdentities) {
  Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.uniform_index(60);
    auto truth = random_labels(rng, n, rng.uniform01());
    auto pred = random_labels(rng, n, rng.uniform01());
    auto got = weighted_metrics(pred, truth);
    auto want = oracle::weighted(pred, truth);
    EXPECT_NEAR(got.accuracy, want.accuracy, 1e-12);
    EXPECT_NEAR(got.precision, want.precision, 1e-12);
    EXPECT_NEAR(got.recall, want.recall, 1e-12);
    EXPECT_NEAR(got.f, want.f, 1e-12);
    EXPECT_NEAR(got.recall, got.accuracy, 1e-12);
    auto cm = confusion(pred, truth);
    EXPECT_NEAR(got.accuracy, 1.0 - static_cast<double>(cm.fp + cm.fn) / static_cast<double>(n), 1e-12);
    EXPECT_EQ(cm.total(), n);
    for (double x : {got.accuracy, got.precision, got.recall, got.f}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Roc, Examples) {
  std::vector<double> s = {0.9, 0.8, 0.4, 0.3};
  EXPECT_DOUBLE_EQ(roc_auc(s, std::vector<int>{1, 1, 0, 0}).auc, 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(s, std::vector<int>{1, 0, 1, 0}).auc, 0.75);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>(6, 0.3), std::vector<int>{1, 0, 1, 0, 0, 1}).auc, 0.5);
}

TEST(Roc, CurveRunsFromOriginToCorner) {
  auto roc = roc_auc(std::vector<double>{0.1, 0.4, 0.4, 0.8}, std::vector<int>{0, 1, 0, 1});
  ASSERT_GE(roc.points.size(), 2u);
  EXPECT_EQ(roc.points.front(), (std::pair<double, double>{0.0, 0.0}));
  EXPECT_EQ(roc.points.back(), (std::pair<double, double>{1.0, 1.0}));
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    EXPECT_GE(roc.points[i].first, roc.points[i - 1].first);
    EXPECT_GE(roc.points[i].second, roc.points[i - 1].second);
  }
}

TEST(Roc, SingleClassIsAnError) {
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), InvalidArgument);
  EXPECT_THROW(mann_whitney_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}), InvalidArgument);
}

TEST(Roc, TrapezoidEqualsPairCountAndMannWhitney) {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(80);
    auto truth = random_labels(rng, n);
    truth[0] = 0;
    truth[1] = 1;
    std::vector<double> scores(n);
    for (auto& x : scores) x = static_cast<double>(rng.uniform_index(6)) / 5.0;  // heavy ties
    const double trap = roc_auc(scores, truth).auc;
    EXPECT_NEAR(trap, oracle::pairwise_auc(scores, truth), 1e-9);
    EXPECT_NEAR(trap, mann_whitney_auc(scores, truth), 1e-9);
    std::vector<int> flipped(n);
    for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - truth[i];
    EXPECT_NEAR(trap + roc_auc(scores, flipped).auc, 1.0, 1e-12);
  }
}

TEST(Roc, InvariantUnderIncreasingTransforms) {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 10 + rng.uniform_index(50);
    auto truth = random_labels(rng, n);
    truth[0] = 0;
    truth[1] = 1;
    std::vector<double> s(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.uniform01() * 4 - 2;
      t[i] = std::exp(3 * s[i]) + 7;
    }
    EXPECT_DOUBLE_EQ(roc_auc(s, truth).auc, roc_auc(t, truth).auc);
  }
}

TEST(Roc, RandomScorerNearHalf) {
  Rng rng(99);
  std::vector<int> truth(10000);
  std::vector<double> s(10000);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = static_cast<int>(i % 2);
    s[i] = rng.uniform01();
  }
  double auc = roc_auc(s, truth).auc;
  EXPECT_GE(auc, 0.45);
  EXPECT_LE(auc, 0.55);
}

TEST(Report, EvaluateFillsEverything) {
  std::vector<int> truth = {1, 1, 0, 0, 0};
  std::vector<int> pred = {1, 0, 0, 0, 1};
  std::vector<double> scores = {0.9, 0.4, 0.2, 0.1, 0.6};
  auto r = evaluate(pred, truth, scores);
  EXPECT_EQ(r.confusion.tp, 1u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  ASSERT_TRUE(r.auc.has_value());
  EXPECT_NEAR(*r.auc, oracle::pairwise_auc({0.9, 0.4, 0.2, 0.1, 0.6}, truth), 1e-12);
  EXPECT_DOUBLE_EQ(r.precision_positive, 0.5);
  EXPECT_DOUBLE_EQ(r.recall_positive, 0.5);
  EXPECT_FALSE(evaluate(pred, std::vector<int>(5, 0), scores).auc.has_value());
}

TEST(Report, KeyValueRoundTripIsExact) {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto truth = random_labels(rng, 37);
    truth[0] = 1;
    truth[1] = 0;
    auto pred = random_labels(rng, 37);
    std::vector<double> scores(37);
    for (auto& x : scores) x = rng.uniform01();
    auto r = evaluate(pred, truth, scores);
    r.train_source = "work";
    r.test_source = "facebook";
    r.model = "svm_rbf(svm.C=2)";
    r.seed = 12345678901234ULL;
    std::stringstream s;
    write_report(s, r);
    EXPECT_EQ(read_report(s), r);
  }
}

TEST(Report, MissingKeyIsAParseError) {
  std::istringstream in("train_source = a\n");
  EXPECT_THROW(read_report(in), ParseError);
}

TEST(Report, TableRowHasOneCellPerHeaderColumn) {
  EvaluationReport r;
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), '\t'); };
  EXPECT_EQ(count(report_table_row(r)), count(report_table_header()));
}
