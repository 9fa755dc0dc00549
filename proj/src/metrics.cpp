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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

#include "osv/error.hpp"

namespace osv {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (std::isnan(v))
      throw NumericError(std::string("NaN in ") + what + " population");
}

std::vector<double> sorted_desc(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

std::vector<CurvePoint> pr_curve(std::span<const double> tp_psi,
                                 std::span<const double> ose_psi) {
  if (tp_psi.empty())
    throw UndefinedMetricError("recall is undefined without true positives");
  require_finite(tp_psi, "TP");
  require_finite(ose_psi, "OSE");
  const auto tp = sorted_desc(tp_psi);
  const auto ose = sorted_desc(ose_psi);
  const double total_tp = static_cast<double>(tp.size());

  std::vector<CurvePoint> curve;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < tp.size() || j < ose.size()) {
    double theta;
    if (j == ose.size() || (i < tp.size() && tp[i] >= ose[j]))
      theta = tp[i];
    else
      theta = ose[j];
    while (i < tp.size() && tp[i] >= theta) ++i;
    while (j < ose.size() && ose[j] >= theta) ++j;
    CurvePoint p;
    p.threshold = theta;
    p.kept_tp = i;
    p.kept_ose = j;
    p.precision = static_cast<double>(i) / static_cast<double>(i + j);
    p.recall = static_cast<double>(i) / total_tp;
    curve.push_back(p);
  }
  return curve;
}

double aupr(std::span<const CurvePoint> curve) {
  if (curve.empty()) return 0.0;
  double prev_recall = 0.0;
  double prev_precision = curve.front().precision;
  double area = 0.0;
  for (const auto& p : curve) {
    area += (p.recall - prev_recall) * (p.precision + prev_precision) * 0.5;
    prev_recall = p.recall;
    prev_precision = p.precision;
  }
  return area;
}

std::optional<double> precision_at_recall(std::span<const CurvePoint> curve,
                                          double target) {
  std::optional<double> best;
  for (const auto& p : curve)
    if (p.recall >= target && (!best || p.precision > *best)) best = p.precision;
  return best;
}

std::optional<double> recall_at_precision(std::span<const CurvePoint> curve,
                                          double target) {
  std::optional<double> best;
  for (const auto& p : curve)
    if (p.precision >= target && (!best || p.recall > *best)) best = p.recall;
  return best;
}

double auroc(std::span<const double> tp_psi, std::span<const double> ose_psi) {
  if (tp_psi.empty() || ose_psi.empty())
    throw UndefinedMetricError("AuROC needs both TP and OSE predictions");
  require_finite(tp_psi, "TP");
  require_finite(ose_psi, "OSE");
  std::vector<double> tp(tp_psi.begin(), tp_psi.end());
  std::vector<double> ose(ose_psi.begin(), ose_psi.end());
  std::sort(tp.begin(), tp.end());
  std::sort(ose.begin(), ose.end());
  // Twice the Mann-Whitney U statistic, kept integral so the result is
  // exactly wins/pairs.
  std::uint64_t doubled = 0;
  std::size_t below = 0;
  std::size_t at_or_below = 0;
  for (double v : tp) {
    while (below < ose.size() && ose[below] < v) ++below;
    if (at_or_below < below) at_or_below = below;
    while (at_or_below < ose.size() && ose[at_or_below] <= v) ++at_or_below;
    doubled += 2 * below + (at_or_below - below);
  }
  return static_cast<double>(doubled) /
         (2.0 * static_cast<double>(tp.size()) *
          static_cast<double>(ose.size()));
}

double top1_accuracy(std::span<const PredictionOutcome> closed) {
  if (closed.empty())
    throw UndefinedMetricError("accuracy is undefined without images");
  std::size_t tp = 0;
  for (const auto& o : closed) {
    if (o.pass != Pass::kClosed)
      throw ConsistencyError("accuracy takes closed-pass outcomes only");
    if (o.outcome == Outcome::kTruePositive) ++tp;
  }
  return static_cast<double>(tp) / static_cast<double>(closed.size());
}

double UncertaintyHistogram::edge(std::size_t i) const {
  if (i < edges.size()) return edges[i];
  if (i >= bins) return upper;
  return lower + (upper - lower) * static_cast<double>(i) /
                     static_cast<double>(bins);
}

UncertaintyHistogram uncertainty_histogram(std::span<const double> tp_psi,
                                           std::span<const double> ose_psi,
                                           std::size_t bins) {
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  require_finite(tp_psi, "TP");
  require_finite(ose_psi, "OSE");
  UncertaintyHistogram h;
  h.bins = bins;
  h.tp_mass.assign(bins, 0.0);
  h.ose_mass.assign(bins, 0.0);
  h.tp_empty = tp_psi.empty();
  h.ose_empty = ose_psi.empty();
  if (h.tp_empty && h.ose_empty) return h;

  double lo = INFINITY;
  double hi = -INFINITY;
  for (auto pop : {tp_psi, ose_psi})
    for (double v : pop) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  h.lower = lo;
  h.upper = hi;

  auto fill = [&](std::span<const double> pop, std::vector<double>& mass) {
    if (pop.empty()) return;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : pop) {
      std::size_t b = 0;
      if (width > 0.0)
        b = std::min(bins - 1,
                     static_cast<std::size_t>(std::floor((v - lo) / width)));
      mass[b] += 1.0;
    }
    for (double& m : mass) m /= static_cast<double>(pop.size());
  };
  fill(tp_psi, h.tp_mass);
  fill(ose_psi, h.ose_mass);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(h.edge(i));
  return h;
}

std::vector<CaptureStats> negative_capture_stats(
    std::span<const PredictionOutcome> closed,
    std::span<const PredictionOutcome> open, std::size_t negative_count) {
  if (negative_count == 0)
    throw ParameterError("capture statistics need a run with negatives");
  std::vector<CaptureStats> stats(negative_count);
  auto tally = [&](std::span<const PredictionOutcome> outcomes, bool is_open) {
    for (const auto& o : outcomes) {
      const auto& slot = o.prediction.negative_slot;
      if (!slot) continue;
      if (*slot >= negative_count)
        throw ConsistencyError("negative slot index out of range");
      if (is_open)
        ++stats[*slot].open_captured;
      else
        ++stats[*slot].closed_captured;
    }
  };
  tally(closed, false);
  tally(open, true);
  return stats;
}

}  // namespace osv
