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

#include "osv/matching.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "osv/error.hpp"

namespace osv {
namespace {

TEST(Iou, Examples) {
  const Box a{0, 0, 2, 2};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, Box{5, 5, 6, 6}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, Box{2, 0, 4, 2}), 0.0);
  EXPECT_NEAR(iou(a, Box{1, 0, 3, 2}), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(iou(a, Box{1, 0, 3, 2}), oracle::iou_cells(0, 0, 2, 2, 1, 0, 3, 2));
}

TEST(Iou, MatchesCellCounting) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(0, 12), s(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const int ax = c(rng), ay = c(rng), aw = s(rng), ah = s(rng);
    const int bx = c(rng), by = c(rng), bw = s(rng), bh = s(rng);
    EXPECT_NEAR(iou(Box{double(ax), double(ay), double(ax + aw), double(ay + ah)},
                    Box{double(bx), double(by), double(bx + bw), double(by + bh)}),
                oracle::iou_cells(ax, ay, ax + aw, ay + ah, bx, by, bx + bw, by + bh),
                1e-12);
  }
}

TEST(Box, FromXywh) {
  EXPECT_EQ(Box::from_xywh(1, 2, 3, 4), (Box{1, 2, 4, 6}));
  EXPECT_FALSE((Box{1, 1, 1, 2}).valid());
}

TEST(Assign, DuplicateIsFalsePositive) {
  const std::vector<GroundTruthBox> gts = {{{0, 0, 10, 10}, 0}};
  const std::vector<Detection> dets = {{{0, 0, 10, 9}, 0, 0.8},
                                       {{0, 0, 10, 10}, 0, 0.9}};
  EXPECT_EQ(assign_detections(dets, gts), (std::vector<bool>{false, true}));
}

TEST(Assign, ClassMismatchAndThreshold) {
  const std::vector<GroundTruthBox> gts = {{{0, 0, 10, 10}, 1}};
  const std::vector<Detection> wrong = {{{0, 0, 10, 9}, 0, 0.9}};
  EXPECT_EQ(assign_detections(wrong, gts), std::vector<bool>{false});
  const std::vector<Detection> low = {{{0, 0, 10, 3}, 1, 0.9}};
  EXPECT_EQ(assign_detections(low, gts), std::vector<bool>{false});
  EXPECT_THROW(assign_detections(low, gts, 0.0), ParameterError);
  EXPECT_THROW(assign_detections(low, gts, 1.5), ParameterError);
}

TEST(Assign, PrefersHighestIou) {
  const std::vector<GroundTruthBox> gts = {{{0, 0, 10, 10}, 0},
                                           {{1, 0, 11, 10}, 0}};
  const std::vector<Detection> dets = {{{1, 0, 11, 10}, 0, 0.9},
                                       {{0, 0, 10, 10}, 0, 0.5}};
  EXPECT_EQ(assign_detections(dets, gts), (std::vector<bool>{true, true}));
}

std::vector<Detection> random_dets(std::mt19937_64& rng, std::size_t n,
                                   std::size_t classes, bool coarse_conf) {
  std::uniform_int_distribution<int> c(0, 6), s(2, 6);
  std::uniform_int_distribution<std::size_t> k(0, classes - 1);
  std::uniform_int_distribution<int> q(0, 3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = c(rng), y = c(rng);
    out.push_back({{x, y, x + s(rng), y + s(rng)}, k(rng),
                   coarse_conf ? q(rng) / 4.0 : u(rng)});
  }
  return out;
}

std::vector<GroundTruthBox> random_gts(std::mt19937_64& rng, std::size_t n,
                                       std::size_t classes) {
  std::vector<GroundTruthBox> out;
  for (const auto& d : random_dets(rng, n, classes, false))
    out.push_back({d.box, d.class_id});
  return out;
}

TEST(Assign, MatchesReferenceOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto dets = random_dets(rng, 1 + trial % 5, 2, trial % 2 == 0);
    const auto gts = random_gts(rng, trial % 4, 2);
    for (double t : {0.3, 0.5, 0.75})
      ASSERT_EQ(assign_detections(dets, gts, t), oracle::assign(dets, gts, t))
          << "trial " << trial;
  }
}

TEST(Assign, InvariantToInputPermutation) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    auto dets = random_dets(rng, 5, 2, false);
    const auto gts = random_gts(rng, 3, 2);
    const auto flags = assign_detections(dets, gts);
    std::vector<std::size_t> perm(dets.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Detection> shuffled;
    for (auto p : perm) shuffled.push_back(dets[p]);
    const auto again = assign_detections(shuffled, gts);
    for (std::size_t i = 0; i < perm.size(); ++i)
      EXPECT_EQ(again[i], flags[perm[i]]);
  }
}

TEST(Ap, Examples) {
  const std::vector<RankedOutcome> one = {{0.9, true}};
  EXPECT_DOUBLE_EQ(*average_precision(one, 1), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision({}, 1), 0.0);
  EXPECT_FALSE(average_precision(one, 0));
  // TP, FP, TP with 2 GT: precision envelope 1 up to recall 0.5, 2/3 after
  const std::vector<RankedOutcome> mixed = {{0.9, true}, {0.8, false}, {0.7, true}};
  EXPECT_NEAR(*average_precision(mixed, 2), (51 * 1.0 + 50 * 2.0 / 3.0) / 101, 1e-12);
}

TEST(Ap, MatchesAllPointsOracle) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> q(0, 4);
  std::bernoulli_distribution b(0.6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<RankedOutcome> ranked;
    std::size_t tps = 0;
    for (int i = 0; i < trial % 9; ++i) {
      ranked.push_back({q(rng) / 4.0, b(rng)});
      tps += ranked.back().true_positive;
    }
    const std::size_t gt = tps + trial % 3 + (tps == 0);
    ASSERT_NEAR(*average_precision(ranked, gt), oracle::average_precision(ranked, gt),
                1e-12);
  }
}

TEST(Ap, LowFalsePositiveNeverHelpsAndTpNeverHurts) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 1);
  std::bernoulli_distribution b(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RankedOutcome> ranked;
    for (int i = 0; i < 6; ++i) ranked.push_back({u(rng), b(rng)});
    const std::size_t gt = 7;
    const double base = *average_precision(ranked, gt);
    auto with_fp = ranked;
    with_fp.push_back({0.05, false});
    EXPECT_LE(*average_precision(with_fp, gt), base + 1e-15);
    auto with_tp = ranked;
    with_tp.push_back({u(rng), true});
    EXPECT_GE(*average_precision(with_tp, gt), base - 1e-15);
  }
}

TEST(Map, SkipsClassesWithoutTruth) {
  const std::vector<std::vector<RankedOutcome>> per_class = {
      {{0.9, true}}, {{0.5, false}}, {}};
  const std::size_t gts[] = {1, 0, 2};
  const auto r = mean_average_precision(per_class, gts);
  EXPECT_EQ(r.classes_with_gt, 2u);
  EXPECT_DOUBLE_EQ(r.map, 0.5);
  EXPECT_FALSE(r.per_class_ap[1]);
}

}  // namespace
}  // namespace osv
