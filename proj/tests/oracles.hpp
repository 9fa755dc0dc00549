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

// Naive reference implementations used as test oracles. They favour the
// most literal reading of each definition over speed or sharing code with
// the library.
#ifndef OSV_TESTS_ORACLES_HPP_
#define OSV_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "osv/matching.hpp"
#include "osv/metrics.hpp"

namespace osv::oracle {

// Area of the intersection over area of the union, by counting unit cells
// of integer-cornered boxes.
inline double iou_cells(int ax1, int ay1, int ax2, int ay2, int bx1, int by1,
                        int bx2, int by2) {
  long inter = 0, uni = 0;
  const int lo_x = std::min(ax1, bx1), hi_x = std::max(ax2, bx2);
  const int lo_y = std::min(ay1, by1), hi_y = std::max(ay2, by2);
  for (int x = lo_x; x < hi_x; ++x)
    for (int y = lo_y; y < hi_y; ++y) {
      const bool in_a = x >= ax1 && x < ax2 && y >= ay1 && y < ay2;
      const bool in_b = x >= bx1 && x < bx2 && y >= by1 && y < by2;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

// Detections are consumed one at a time by a linear scan for the highest
// remaining confidence (first index on ties); each claims its best unmatched
// same-class truth.
inline std::vector<bool> assign(const std::vector<Detection>& dets,
                                const std::vector<GroundTruthBox>& gts,
                                double threshold) {
  std::vector<bool> done(dets.size(), false), flags(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t step = 0; step < dets.size(); ++step) {
    std::size_t pick = dets.size();
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (!done[i] && (pick == dets.size() ||
                       dets[i].confidence > dets[pick].confidence))
        pick = i;
    done[pick] = true;
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].class_id != dets[pick].class_id) continue;
      const double v = iou(dets[pick].box, gts[g].box);
      if (v >= threshold && v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best) {
      taken[*best] = true;
      flags[pick] = true;
    }
  }
  return flags;
}

// All-points precision/recall, then interpolated precision read at the 101
// COCO recall levels (numpy linspace(0, 1, 101)).
inline double average_precision(const std::vector<RankedOutcome>& ranked,
                                std::size_t gt_count) {
  std::vector<std::size_t> order;
  std::vector<bool> used(ranked.size(), false);
  for (std::size_t step = 0; step < ranked.size(); ++step) {
    std::size_t pick = ranked.size();
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (!used[i] && (pick == ranked.size() ||
                       ranked[i].confidence > ranked[pick].confidence))
        pick = i;
    used[pick] = true;
    order.push_back(pick);
  }
  std::vector<double> prec, rec;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    std::size_t tp = 0;
    for (std::size_t j = 0; j < k; ++j) tp += ranked[order[j]].true_positive;
    prec.push_back(double(tp) / double(k));
    rec.push_back(double(tp) / double(gt_count));
  }
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double level = i == 100 ? 1.0 : i * (1.0 / 100.0);
    double best = 0.0;
    for (std::size_t k = 0; k < prec.size(); ++k)
      if (rec[k] >= level) best = std::max(best, prec[k]);
    sum += best;
  }
  return sum / 101.0;
}

struct PrPoint {
  double threshold, precision, recall;
  std::size_t tp, ose;
};

// Every distinct psi value as a threshold, counts by direct scanning.
inline std::vector<PrPoint> pr_points(const std::vector<double>& tp,
                                      const std::vector<double>& ose) {
  std::set<double, std::greater<>> thresholds(tp.begin(), tp.end());
  thresholds.insert(ose.begin(), ose.end());
  std::vector<PrPoint> out;
  for (double t : thresholds) {
    std::size_t a = 0, b = 0;
    for (double v : tp) a += v >= t;
    for (double v : ose) b += v >= t;
    out.push_back({t, a + b == 0 ? 0.0 : double(a) / double(a + b),
                   double(a) / double(tp.size()), a, b});
  }
  return out;
}

inline double aupr(const std::vector<PrPoint>& pts) {
  double area = 0.0, prev_r = 0.0, prev_p = pts.front().precision;
  for (const auto& p : pts) {
    area += (p.recall - prev_r) * (p.precision + prev_p) / 2.0;
    prev_r = p.recall;
    prev_p = p.precision;
  }
  return area;
}

inline std::optional<double> p_at_r(const std::vector<PrPoint>& pts,
                                    double target) {
  std::optional<double> best;
  for (const auto& p : pts)
    if (p.recall >= target && (!best || p.precision > *best)) best = p.precision;
  return best;
}

inline std::optional<double> r_at_p(const std::vector<PrPoint>& pts,
                                    double target) {
  std::optional<double> best;
  for (const auto& p : pts)
    if (p.precision >= target && (!best || p.recall > *best)) best = p.recall;
  return best;
}

// Pairwise comparison count; exact as a ratio of integers.
inline double auroc(const std::vector<double>& tp,
                    const std::vector<double>& ose) {
  std::uint64_t twice = 0;
  for (double a : tp)
    for (double b : ose) twice += a > b ? 2 : (a == b ? 1 : 0);
  return double(twice) / (2.0 * double(tp.size()) * double(ose.size()));
}

}  // namespace osv::oracle

#endif  // OSV_TESTS_ORACLES_HPP_
