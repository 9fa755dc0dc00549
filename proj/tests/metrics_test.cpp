/* Copyright 2026 The osvlm Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "osv/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "osv/error.hpp"
#include "osv/protocol.hpp"

namespace osv {
namespace {

using V = std::vector<double>;

void expect_matches_oracle(const V& tp, const V& ose) {
  const auto curve = pr_curve(tp, ose);
  const auto ref = oracle::pr_points(tp, ose);
  ASSERT_EQ(curve.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_EQ(curve[i].threshold, ref[i].threshold);
    EXPECT_EQ(curve[i].kept_tp, ref[i].tp);
    EXPECT_EQ(curve[i].kept_ose, ref[i].ose);
    EXPECT_NEAR(curve[i].precision, ref[i].precision, 1e-12);
    EXPECT_NEAR(curve[i].recall, ref[i].recall, 1e-12);
  }
  EXPECT_NEAR(aupr(curve), oracle::aupr(ref), 1e-9);
  const auto p = precision_at_recall(curve), rp = oracle::p_at_r(ref, 0.95);
  ASSERT_EQ(p.has_value(), rp.has_value());
  if (p) EXPECT_NEAR(*p, *rp, 1e-12);
  const auto r = recall_at_precision(curve), rr = oracle::r_at_p(ref, 0.95);
  ASSERT_EQ(r.has_value(), rr.has_value());
  if (r) EXPECT_NEAR(*r, *rr, 1e-12);
  if (!ose.empty()) EXPECT_EQ(auroc(tp, ose), oracle::auroc(tp, ose));
}

TEST(PrCurve, PerfectSeparation) {
  const auto c = pr_curve(V{1.0}, V{0.0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (CurvePoint{1.0, 1.0, 1.0, 1, 0}));
  EXPECT_EQ(c[1], (CurvePoint{0.0, 0.5, 1.0, 1, 1}));
  EXPECT_DOUBLE_EQ(aupr(c), 1.0);
  EXPECT_EQ(precision_at_recall(c), 1.0);
  EXPECT_EQ(recall_at_precision(c), 1.0);
}

TEST(PrCurve, InvertedSeparation) {
  const auto c = pr_curve(V{0.2}, V{0.9});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (CurvePoint{0.9, 0.0, 0.0, 0, 1}));
  EXPECT_EQ(c[1], (CurvePoint{0.2, 0.5, 1.0, 1, 1}));
  EXPECT_FALSE(recall_at_precision(c));
}

TEST(PrCurve, ThreeTpTwoOse) {
  const V tp = {0.9, 0.8, 0.4}, ose = {0.7, 0.3};
  const auto c = pr_curve(tp, ose);
  ASSERT_EQ(c.size(), 5u);
  // hand-enumerated: thresholds .9 .8 .7 .4 .3
  EXPECT_NEAR(c[2].precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c[3].precision, 0.75, 1e-15);
  EXPECT_NEAR(c[4].precision, 0.6, 1e-15);
  const double area = (1.0 / 3) * 1.0 + (1.0 / 3) * 1.0 + 0 +
                      (1.0 / 3) * (2.0 / 3 + 0.75) / 2 + 0;
  EXPECT_NEAR(aupr(c), area, 1e-12);
  EXPECT_EQ(precision_at_recall(c), 0.75);
  EXPECT_EQ(recall_at_precision(c), 2.0 / 3.0);
  expect_matches_oracle(tp, ose);
}

TEST(PrCurve, EmptyOseAndErrors) {
  const auto c = pr_curve(V{0.5, 0.5}, V{});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(aupr(c), 1.0);
  EXPECT_THROW(pr_curve(V{}, V{0.1}), UndefinedMetricError);
  EXPECT_THROW(pr_curve(V{NAN}, V{0.1}), NumericError);
}

TEST(PrCurve, RandomInstancesMatchOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> q(0, 20);
  for (int trial = 0; trial < 300; ++trial) {
    V tp(1 + trial % 15), ose(trial % 11);
    for (double& x : tp) x = q(rng) / 20.0;
    for (double& x : ose) x = q(rng) / 20.0;
    expect_matches_oracle(tp, ose);
  }
}

TEST(Aupr, UninformativeScoreGivesBaseRate) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u;
  V tp(25000), ose(75000);
  for (double& x : tp) x = u(rng);
  for (double& x : ose) x = u(rng);
  EXPECT_NEAR(aupr(pr_curve(tp, ose)), 0.25, 0.02);
  EXPECT_NEAR(auroc(tp, ose), 0.5, 0.01);
}

TEST(Auroc, Examples) {
  EXPECT_EQ(auroc(V{1.0}, V{0.0}), 1.0);
  EXPECT_EQ(auroc(V{0.3, 0.6, 0.9}, V{0.3, 0.6, 0.9}), 0.5);
  EXPECT_THROW(auroc(V{}, V{1}), UndefinedMetricError);
  EXPECT_THROW(auroc(V{1}, V{}), UndefinedMetricError);
}

TEST(Auroc, RandomMatchesPairwiseExactly) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> q(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    V tp(20), ose(20);
    for (double& x : tp) x = q(rng) / 10.0;
    for (double& x : ose) x = q(rng) / 10.0;
    EXPECT_EQ(auroc(tp, ose), oracle::auroc(tp, ose));
  }
}

TEST(Auroc, UnaffectedByDuplicatingNegatives) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  V tp(50), ose(40);
  for (double& x : tp) x = z(rng) + 1;
  for (double& x : ose) x = z(rng);
  V many;
  for (int k = 0; k < 10; ++k) many.insert(many.end(), ose.begin(), ose.end());
  EXPECT_NEAR(auroc(tp, many), auroc(tp, ose), 1e-12);
  EXPECT_LT(aupr(pr_curve(tp, many)), aupr(pr_curve(tp, ose)));
}

TEST(Operating, NotAchievable) {
  // precision never reaches 0.95
  const auto c = pr_curve(V{0.5, 0.4}, V{0.9, 0.8});
  EXPECT_FALSE(recall_at_precision(c));
  EXPECT_TRUE(precision_at_recall(c));
}

PredictionOutcome outcome(Outcome o, Pass pass,
                          std::optional<std::size_t> slot = std::nullopt) {
  PredictionOutcome p;
  p.outcome = o;
  p.pass = pass;
  p.prediction.negative_slot = slot;
  return p;
}

TEST(Accuracy, CountsTpOverPredictions) {
  const std::vector<PredictionOutcome> closed = {
      outcome(Outcome::kTruePositive, Pass::kClosed),
      outcome(Outcome::kFalsePositiveClosed, Pass::kClosed),
      outcome(Outcome::kRejected, Pass::kClosed, 0),
      outcome(Outcome::kTruePositive, Pass::kClosed)};
  EXPECT_DOUBLE_EQ(top1_accuracy(closed), 0.5);
}

TEST(Histogram, SharedEdgesAndMass) {
  const auto h = uncertainty_histogram(V{0.0, 1.0, 1.0}, V{0.5}, 4);
  EXPECT_EQ(h.lower, 0.0);
  EXPECT_EQ(h.upper, 1.0);
  EXPECT_DOUBLE_EQ(h.edge(2), 0.5);
  EXPECT_NEAR(h.tp_mass[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(h.tp_mass[3], 2.0 / 3, 1e-15);
  EXPECT_EQ(h.ose_mass[2], 1.0);
  const auto empty = uncertainty_histogram(V{0.2}, V{}, 3);
  EXPECT_TRUE(empty.ose_empty);
  EXPECT_EQ(empty.tp_mass[0], 1.0);
  EXPECT_EQ(empty.ose_mass, (V{0, 0, 0}));
}

TEST(Capture, CountsPerSlot) {
  const std::vector<PredictionOutcome> closed = {
      outcome(Outcome::kRejected, Pass::kClosed, 1),
      outcome(Outcome::kTruePositive, Pass::kClosed)};
  const std::vector<PredictionOutcome> open = {
      outcome(Outcome::kRejected, Pass::kOpen, 0),
      outcome(Outcome::kRejected, Pass::kOpen, 0),
      outcome(Outcome::kOpenSetError, Pass::kOpen)};
  const auto stats = negative_capture_stats(closed, open, 2);
  EXPECT_EQ(stats[0], (CaptureStats{0, 2}));
  EXPECT_EQ(stats[1], (CaptureStats{1, 0}));
  EXPECT_THROW(negative_capture_stats(closed, open, 0), ParameterError);
}

}  // namespace
}  // namespace osv
