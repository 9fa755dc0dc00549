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

// Open-set metrics over two uncertainty populations: psi of closed-pass
// true positives (the positive class) and psi of open-set errors (the
// negative class). A prediction is kept at threshold theta iff psi >= theta.

#ifndef OSV_METRICS_HPP_
#define OSV_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osv/protocol.hpp"

namespace osv {

inline constexpr double kOperatingPoint = 0.95;

struct CurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t kept_tp = 0;
  std::size_t kept_ose = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// One point per distinct psi value, thresholds descending. Throws
// UndefinedMetricError when tp_psi is empty, NumericError on NaN.
std::vector<CurvePoint> pr_curve(std::span<const double> tp_psi,
                                 std::span<const double> ose_psi);

// Trapezoidal area under precision(recall), anchored at recall 0 with the
// precision of the highest-threshold point.
double aupr(std::span<const CurvePoint> curve);

// Best precision among points with recall >= target, or nullopt when no
// point qualifies (rendered "-").
std::optional<double> precision_at_recall(std::span<const CurvePoint> curve,
                                          double target = kOperatingPoint);
// Best recall among points with precision >= target, or nullopt.
std::optional<double> recall_at_precision(std::span<const CurvePoint> curve,
                                          double target = kOperatingPoint);

// P(psi_tp > psi_ose) + 0.5 P(psi_tp == psi_ose).
double auroc(std::span<const double> tp_psi, std::span<const double> ose_psi);

// TP count / closed-pass predictions.
double top1_accuracy(std::span<const PredictionOutcome> closed);

struct UncertaintyHistogram {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t bins = 0;
  // Normalized masses; all zero (and the flag set) for an empty population.
  std::vector<double> tp_mass;
  std::vector<double> ose_mass;
  bool tp_empty = false;
  bool ose_empty = false;
  // bins + 1 boundaries, stored so a reloaded report re-renders exactly.
  std::vector<double> edges;

  double edge(std::size_t i) const;
};

// Shared edges spanning [min, max] of both populations. The top edge is
// inclusive; a zero-width range puts everything in the first bin.
UncertaintyHistogram uncertainty_histogram(std::span<const double> tp_psi,
                                           std::span<const double> ose_psi,
                                           std::size_t bins);

struct CaptureStats {
  std::size_t closed_captured = 0;
  std::size_t open_captured = 0;
  friend bool operator==(const CaptureStats&, const CaptureStats&) = default;
};

// Per negative slot: how many closed-pass predictions it won (harm) and
// how many open-pass predictions it won (benefit).
std::vector<CaptureStats> negative_capture_stats(
    std::span<const PredictionOutcome> closed,
    std::span<const PredictionOutcome> open, std::size_t negative_count);

}  // namespace osv

#endif  // OSV_METRICS_HPP_
