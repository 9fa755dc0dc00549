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

#include "osv/protocol.hpp"

#include <algorithm>
#include <exception>
#include <unordered_map>
#include <unordered_set>

#include "osv/error.hpp"
#include "osv/io_util.hpp"
#include "osv/kernels.hpp"

namespace osv {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::unordered_map<std::string_view, const ImageEntry*> image_index(
    const DatasetManifest& manifest) {
  std::unordered_map<std::string_view, const ImageEntry*> index;
  for (const auto& image : manifest.images) index.emplace(image.image_id, &image);
  return index;
}

}  // namespace

std::string_view to_string(Pass pass) {
  return pass == Pass::kClosed ? "closed" : "open";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kTruePositive: return "TP";
    case Outcome::kFalsePositiveClosed: return "FP_closed";
    case Outcome::kOpenSetError: return "OSE";
    case Outcome::kRejected: return "REJECTED";
  }
  return "?";
}

const PlanImage* PlanFile::find_open(std::string_view image_id) const {
  for (const auto& image : open_images)
    if (image.image_id == image_id) return &image;
  return nullptr;
}

PlanFile build_plan(const DatasetManifest& manifest,
                    const NegativeSpec& negatives, std::uint64_t seed) {
  manifest.validate();
  negatives.validate();
  PlanFile plan;
  plan.dataset_id = manifest.dataset_id;
  plan.task = manifest.task;
  plan.seed = seed;
  plan.negatives = negatives;
  plan.negatives.fit.reset();
  plan.closed_query = manifest.classes;
  std::size_t skipped = 0;
  for (const auto& image : manifest.images) {
    if (!image.open_only()) plan.closed_images.push_back(image.image_id);
    const std::unordered_set<std::string_view> own(image.gt_labels.begin(),
                                                   image.gt_labels.end());
    PlanImage open{image.image_id, {}};
    for (const auto& c : manifest.classes)
      if (!own.count(c)) open.open_query.push_back(c);
    if (open.open_query.empty()) {
      ++skipped;
      plan.excluded_from_open.push_back(image.image_id);
      continue;
    }
    plan.open_images.push_back(std::move(open));
  }
  if (skipped > 0)
    log_warning(std::to_string(skipped) + " image(s) contain every class (first: '" +
                plan.excluded_from_open.front() + "'); skipped in the open pass");
  return plan;
}

ordered_json to_json(const PlanFile& plan) {
  ordered_json j;
  j["schema_version"] = kPlanSchemaVersion;
  j["dataset_id"] = plan.dataset_id;
  j["task"] = std::string(to_string(plan.task));
  j["seed"] = plan.seed;
  j["negatives"] = to_json(plan.negatives);
  j["closed_query"] = plan.closed_query;
  j["closed_images"] = plan.closed_images;
  ordered_json open = ordered_json::array();
  for (const auto& image : plan.open_images) {
    ordered_json e;
    e["image_id"] = image.image_id;
    e["open_query"] = image.open_query;
    open.push_back(std::move(e));
  }
  j["open_images"] = std::move(open);
  j["excluded_from_open"] = plan.excluded_from_open;
  return j;
}

PlanFile plan_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kPlanSchemaVersion)
      throw FormatError("unsupported plan schema version " +
                        std::to_string(version));
    PlanFile plan;
    plan.dataset_id = j.at("dataset_id").get<std::string>();
    plan.task = task_from_string(j.at("task").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.negatives = negative_spec_from_json(j.at("negatives"));
    plan.closed_query = j.at("closed_query").get<std::vector<std::string>>();
    plan.closed_images = j.at("closed_images").get<std::vector<std::string>>();
    for (const auto& e : j.at("open_images"))
      plan.open_images.push_back(
          PlanImage{e.at("image_id").get<std::string>(),
                    e.at("open_query").get<std::vector<std::string>>()});
    plan.excluded_from_open =
        j.at("excluded_from_open").get<std::vector<std::string>>();
    return plan;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed plan: ") + e.what());
  }
}

void save_plan(const std::filesystem::path& path, const PlanFile& plan) {
  write_text_atomic(path, to_json(plan).dump(2) + "\n");
}

PlanFile load_plan(const std::filesystem::path& path) {
  try {
    return plan_from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void check_plan_matches(const PlanFile& plan, const DatasetManifest& manifest) {
  if (plan.task != manifest.task)
    throw ConsistencyError("plan task differs from manifest task");
  if (plan.closed_query != manifest.classes)
    throw ConsistencyError("plan closed query set differs from manifest classes");
  std::vector<std::string_view> expected;
  for (const auto& image : manifest.images)
    if (!image.open_only()) expected.push_back(image.image_id);
  if (plan.closed_images.size() != expected.size())
    throw ConsistencyError("plan and manifest list different image counts");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (plan.closed_images[i] != expected[i])
      throw ConsistencyError("plan image '" + plan.closed_images[i] +
                             "' does not match the manifest");
}

ImagePrediction make_prediction(std::string image_id,
                                const PredictionDecision& decision,
                                std::span<const std::string> query_labels,
                                std::optional<Box> box) {
  ImagePrediction p;
  p.image_id = std::move(image_id);
  if (decision.predicted_index) {
    if (*decision.predicted_index >= query_labels.size())
      throw ShapeError("predicted index outside the query set");
    p.predicted_label = query_labels[*decision.predicted_index];
  }
  p.negative_slot = decision.negative_slot;
  p.psi = decision.psi;
  p.box = box;
  return p;
}

std::vector<PredictionOutcome> label_classification(
    std::span<const ImagePrediction> predictions,
    const DatasetManifest& manifest, Pass pass) {
  const auto index = image_index(manifest);
  const auto classes = manifest.class_lookup();
  std::unordered_set<std::string_view> seen;
  std::vector<PredictionOutcome> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) {
    auto it = index.find(p.image_id);
    if (it == index.end())
      throw ConsistencyError("prediction for unknown image '" + p.image_id + "'");
    if (!seen.insert(p.image_id).second)
      throw ConsistencyError("more than one prediction for image '" +
                             p.image_id + "'");
    PredictionOutcome o{p, pass, Outcome::kRejected};
    if (!p.rejected()) {
      if (!classes.count(p.predicted_label))
        throw ConsistencyError("prediction with unknown label '" +
                               p.predicted_label + "'");
      if (pass == Pass::kOpen)
        o.outcome = Outcome::kOpenSetError;
      else if (it->second->open_only())
        throw ConsistencyError("image '" + p.image_id +
                               "' is held out and not part of the closed pass");
      else
        o.outcome = p.predicted_label == it->second->gt_labels.front()
                        ? Outcome::kTruePositive
                        : Outcome::kFalsePositiveClosed;
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<PredictionOutcome> label_detection(
    std::span<const ImagePrediction> predictions,
    const DatasetManifest& manifest, const PlanFile& plan, Pass pass,
    double iou_threshold) {
  const auto index = image_index(manifest);
  const auto classes = manifest.class_lookup();
  std::unordered_map<std::string_view, const PlanImage*> open_index;
  for (const auto& image : plan.open_images)
    open_index.emplace(image.image_id, &image);

  // Group by image, in order of first appearance.
  std::vector<std::string_view> groups;
  std::unordered_map<std::string_view, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    if (!index.count(p.image_id))
      throw ConsistencyError("detection for unknown image '" + p.image_id + "'");
    if (!p.box || !p.box->valid())
      throw ConsistencyError("detection on image '" + p.image_id +
                             "' has no valid box");
    auto [it, fresh] = members.try_emplace(p.image_id);
    if (fresh) groups.push_back(p.image_id);
    it->second.push_back(i);
  }

  std::vector<PredictionOutcome> out(predictions.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(kernels::worker_count())
  for (std::ptrdiff_t g = 0; g < n; ++g) {
    try {
      const auto image_id = groups[g];
      const ImageEntry& image = *index.at(image_id);
      const auto& rows = members.at(image_id);

      std::unordered_set<std::string_view> query;
      if (pass == Pass::kOpen) {
        auto op = open_index.find(image_id);
        if (op == open_index.end())
          throw ConsistencyError("image '" + std::string(image_id) +
                                 "' is not part of the open pass");
        query.insert(op->second->open_query.begin(),
                     op->second->open_query.end());
      }

      std::vector<Detection> dets;
      std::vector<std::size_t> det_rows;
      for (std::size_t r : rows) {
        const auto& p = predictions[r];
        out[r] = PredictionOutcome{p, pass, Outcome::kRejected};
        if (p.rejected()) continue;
        const auto cls = classes.find(p.predicted_label);
        const bool in_query = cls != classes.end() &&
                              (pass == Pass::kClosed ||
                               query.count(p.predicted_label) > 0);
        if (!in_query)
          throw ConsistencyError("detection label '" + p.predicted_label +
                                 "' is outside the " +
                                 std::string(to_string(pass)) +
                                 " query set of image '" +
                                 std::string(image_id) + "'");
        if (pass == Pass::kOpen) {
          out[r].outcome = Outcome::kOpenSetError;
          continue;
        }
        dets.push_back(Detection{*p.box, cls->second, p.psi.softmax});
        det_rows.push_back(r);
      }
      if (pass == Pass::kClosed) {
        std::vector<GroundTruthBox> truths;
        for (const auto& obj : image.boxes)
          truths.push_back(GroundTruthBox{obj.box, classes.at(obj.label)});
        const auto tp = assign_detections(dets, truths, iou_threshold);
        for (std::size_t k = 0; k < det_rows.size(); ++k)
          out[det_rows[k]].outcome =
              tp[k] ? Outcome::kTruePositive : Outcome::kFalsePositiveClosed;
      }
    } catch (...) {
#pragma omp critical(osv_label_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

MapResult detection_map(std::span<const PredictionOutcome> closed,
                        const DatasetManifest& manifest) {
  const auto classes = manifest.class_lookup();
  std::vector<std::vector<RankedOutcome>> per_class(manifest.classes.size());
  std::vector<std::size_t> gt_counts(manifest.classes.size(), 0);
  for (const auto& image : manifest.images)
    for (const auto& obj : image.boxes) ++gt_counts[classes.at(obj.label)];
  for (const auto& o : closed) {
    if (o.pass != Pass::kClosed)
      throw ConsistencyError("mAP takes closed-pass outcomes only");
    if (o.outcome == Outcome::kRejected) continue;
    per_class[classes.at(o.prediction.predicted_label)].push_back(
        RankedOutcome{o.prediction.psi.softmax,
                      o.outcome == Outcome::kTruePositive});
  }
  std::vector<std::string> missing;
  for (std::size_t c = 0; c < gt_counts.size(); ++c)
    if (gt_counts[c] == 0) missing.push_back(manifest.classes[c]);
  if (!missing.empty())
    log_warning(std::to_string(missing.size()) +
                " class(es) have no ground truth and are excluded from mAP "
                "(first: '" + missing.front() + "')");
  return mean_average_precision(per_class, gt_counts);
}

}  // namespace osv
