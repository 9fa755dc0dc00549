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

#include <algorithm>
#include <numeric>

#include "osv/error.hpp"

namespace osv {
namespace {

// np.linspace(0, 1, 101) as computed by the COCO evaluator.
const std::vector<double>& recall_levels() {
  static const std::vector<double> levels = [] {
    std::vector<double> r(kRecallSamples);
    const double step = 1.0 / static_cast<double>(kRecallSamples - 1);
    for (std::size_t i = 0; i < kRecallSamples; ++i)
      r[i] = static_cast<double>(i) * step;
    r.back() = 1.0;
    return r;
  }();
  return levels;
}

std::vector<std::size_t> by_confidence(std::span<const double> confidence) {
  std::vector<std::size_t> order(confidence.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return confidence[a] > confidence[b];
                   });
  return order;
}

}  // namespace

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::vector<bool> assign_detections(std::span<const Detection> detections,
                                    std::span<const GroundTruthBox> truths,
                                    double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ParameterError("IoU threshold must lie in (0, 1]");

  std::vector<double> confidence(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i)
    confidence[i] = detections[i].confidence;

  std::vector<bool> tp(detections.size(), false);
  std::vector<bool> taken(truths.size(), false);
  // Classes never interact, so one confidence-ordered pass that only
  // considers same-class truths is the per-class greedy procedure.
  for (std::size_t d : by_confidence(confidence)) {
    const auto& det = detections[d];
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    for (std::size_t g = 0; g < truths.size(); ++g) {
      if (taken[g] || truths[g].class_id != det.class_id) continue;
      const double overlap = iou(det.box, truths[g].box);
      if (overlap < iou_threshold) continue;
      if (!best || overlap > best_iou) {
        best = g;
        best_iou = overlap;
      }
    }
    if (best) {
      taken[*best] = true;
      tp[d] = true;
    }
  }
  return tp;
}

std::optional<double> average_precision(std::span<const RankedOutcome> ranked,
                                        std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  std::vector<double> confidence(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i)
    confidence[i] = ranked[i].confidence;
  const auto order = by_confidence(confidence);

  std::vector<double> recall(order.size());
  std::vector<double> precision(order.size());
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (ranked[order[k]].true_positive)
      tp += 1.0;
    else
      fp += 1.0;
    recall[k] = tp / static_cast<double>(gt_count);
    precision[k] = tp / (tp + fp);
  }
  for (std::size_t k = precision.size(); k-- > 1;)
    precision[k - 1] = std::max(precision[k - 1], precision[k]);

  double sum = 0.0;
  for (double level : recall_levels()) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end())
      sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / static_cast<double>(kRecallSamples);
}

MapResult mean_average_precision(
    const std::vector<std::vector<RankedOutcome>>& per_class,
    std::span<const std::size_t> gt_counts) {
  if (per_class.size() != gt_counts.size())
    throw ShapeError("per-class outcomes and gt counts differ in length");
  MapResult result;
  result.per_class_ap.reserve(per_class.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    auto ap = average_precision(per_class[c], gt_counts[c]);
    if (ap) {
      sum += *ap;
      ++result.classes_with_gt;
    }
    result.per_class_ap.push_back(ap);
  }
  result.map = result.classes_with_gt > 0
                   ? sum / static_cast<double>(result.classes_with_gt)
                   : 0.0;
  return result;
}

}  // namespace osv
