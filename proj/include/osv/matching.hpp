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

// Box geometry, greedy TP assignment and COCO-style AP at a single IoU.

#ifndef OSV_MATCHING_HPP_
#define OSV_MATCHING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace osv {

inline constexpr double kDefaultIouThreshold = 0.5;
inline constexpr std::size_t kRecallSamples = 101;

// Corner convention in pixels.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  bool valid() const { return x1 < x2 && y1 < y2; }
  double area() const { return (x2 - x1) * (y2 - y1); }
  // From COCO's [x, y, width, height].
  static Box from_xywh(double x, double y, double w, double h) {
    return Box{x, y, x + w, y + h};
  }
  friend bool operator==(const Box&, const Box&) = default;
};

double iou(const Box& a, const Box& b);

struct Detection {
  Box box;
  std::size_t class_id = 0;
  double confidence = 0.0;
};

struct GroundTruthBox {
  Box box;
  std::size_t class_id = 0;
};

// Per-detection TP flags for one image. Within each class, detections are
// visited by descending confidence (ties by input order) and each takes the
// unmatched same-class ground truth with the highest IoU >= threshold
// (ties by lower ground-truth index). Everything else is a false positive.
std::vector<bool> assign_detections(std::span<const Detection> detections,
                                    std::span<const GroundTruthBox> truths,
                                    double iou_threshold = kDefaultIouThreshold);

struct RankedOutcome {
  double confidence = 0.0;
  bool true_positive = false;
};

// 101-point interpolated AP of one class: precision envelope sampled at
// recall i/100, i = 0..100; zero where the recall level is never reached.
// Ties in confidence keep input order. Returns nullopt when gt_count == 0.
std::optional<double> average_precision(std::span<const RankedOutcome> ranked,
                                        std::size_t gt_count);

struct MapResult {
  std::vector<std::optional<double>> per_class_ap;
  double map = 0.0;
  std::size_t classes_with_gt = 0;
};

// Mean over classes that have at least one ground-truth box.
MapResult mean_average_precision(
    const std::vector<std::vector<RankedOutcome>>& per_class,
    std::span<const std::size_t> gt_counts);

}  // namespace osv

#endif  // OSV_MATCHING_HPP_
