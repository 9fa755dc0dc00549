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

// Dual-pass test protocol. Every image is tested twice: a closed pass whose
// query set is the full class list, and an open pass whose query set is the
// class list minus the image's own labels. Closed-pass predictions are
// labelled TP or FP; every accepted open-pass prediction is an open-set
// error (OSE) because no true class is queryable.

#ifndef OSV_PROTOCOL_HPP_
#define OSV_PROTOCOL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "osv/manifest.hpp"
#include "osv/matching.hpp"
#include "osv/negatives.hpp"
#include "osv/similarity.hpp"

namespace osv {

inline constexpr int kPlanSchemaVersion = 1;

enum class Pass { kClosed, kOpen };
std::string_view to_string(Pass pass);

struct PlanImage {
  std::string image_id;
  // Class list minus the image's labels, dataset order preserved.
  std::vector<std::string> open_query;
};

struct PlanFile {
  std::string dataset_id;
  Task task = Task::kClassification;
  std::uint64_t seed = 0;
  NegativeSpec negatives;
  std::vector<std::string> closed_query;
  std::vector<std::string> closed_images;
  std::vector<PlanImage> open_images;
  // Images whose open query set would be empty.
  std::vector<std::string> excluded_from_open;

  const PlanImage* find_open(std::string_view image_id) const;
};

PlanFile build_plan(const DatasetManifest& manifest,
                    const NegativeSpec& negatives, std::uint64_t seed = 0);

nlohmann::ordered_json to_json(const PlanFile& plan);
PlanFile plan_from_json(const nlohmann::json& j);
void save_plan(const std::filesystem::path& path, const PlanFile& plan);
PlanFile load_plan(const std::filesystem::path& path);

// Throws ConsistencyError if the plan was not built from this manifest.
void check_plan_matches(const PlanFile& plan, const DatasetManifest& manifest);

enum class Outcome { kTruePositive, kFalsePositiveClosed, kOpenSetError,
                     kRejected };
std::string_view to_string(Outcome outcome);

// One scored prediction before labelling. For detection, psi.softmax (the
// max softmax or sigmoid score) doubles as the ranking confidence for AP.
struct ImagePrediction {
  std::string image_id;
  // Empty when a negative slot won.
  std::string predicted_label;
  std::optional<std::size_t> negative_slot;
  UncertaintyTriple psi;
  std::optional<Box> box;

  bool rejected() const { return negative_slot.has_value(); }
};

struct PredictionOutcome {
  ImagePrediction prediction;
  Pass pass = Pass::kClosed;
  Outcome outcome = Outcome::kFalsePositiveClosed;
};

// Builds the prediction record for `decision`, made against `query_labels`.
ImagePrediction make_prediction(std::string image_id,
                                const PredictionDecision& decision,
                                std::span<const std::string> query_labels,
                                std::optional<Box> box = std::nullopt);

// Closed pass: TP iff the predicted label is the image's label. Open pass:
// every accepted prediction is an OSE. Rejections are REJECTED in both.
std::vector<PredictionOutcome> label_classification(
    std::span<const ImagePrediction> predictions,
    const DatasetManifest& manifest, Pass pass);

// Closed pass: COCO-style greedy matching per image at `iou_threshold`.
// Open pass: every accepted detection is an OSE, wherever its box lies.
// Detection labels must come from that image's query set for the pass.
std::vector<PredictionOutcome> label_detection(
    std::span<const ImagePrediction> predictions,
    const DatasetManifest& manifest, const PlanFile& plan, Pass pass,
    double iou_threshold = kDefaultIouThreshold);

// mAP over the closed-pass detection outcomes of `manifest`.
MapResult detection_map(std::span<const PredictionOutcome> closed,
                        const DatasetManifest& manifest);

}  // namespace osv

#endif  // OSV_PROTOCOL_HPP_
