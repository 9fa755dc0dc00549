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

// Dataset manifests: the class list plus per-image ground truth.
//
// Accepted inputs:
//   * native manifest JSON  {"task", "dataset_id", "classes", "images": [...]}
//   * COCO annotation JSON  {"images", "annotations", "categories"}
//   * classification JSON lines: optional first line {"classes": [...]},
//     then one {"image_id": ..., "label": ...} per image.

#ifndef OSV_MANIFEST_HPP_
#define OSV_MANIFEST_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "osv/matching.hpp"

namespace osv {

enum class Task { kClassification, kDetection };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct GtObject {
  std::string label;
  Box box;
};

struct ImageEntry {
  std::string image_id;
  // The image's label set, unique, in dataset class order.
  std::vector<std::string> gt_labels;
  std::vector<GtObject> boxes;
  // Labels of classes deliberately absent from the class list. An image
  // whose only labels are held out can never be a TP, so it is tested in
  // the open pass only (with the full class list as its query set).
  std::vector<std::string> held_out_labels;

  bool open_only() const {
    return gt_labels.empty() && !held_out_labels.empty();
  }
};

struct DatasetManifest {
  Task task = Task::kClassification;
  std::string dataset_id;
  std::vector<std::string> classes;
  std::vector<ImageEntry> images;

  // Throws ValidationError on duplicate classes or image ids, labels outside
  // the class list, held-out labels inside it, classification images
  // without exactly one (known or held-out) label, or detection images whose
  // label set differs from their boxes' labels.
  void validate() const;

  std::optional<std::size_t> class_index(std::string_view label) const;
  const ImageEntry* find_image(std::string_view image_id) const;
  std::unordered_map<std::string, std::size_t> class_lookup() const;
};

// Sorts `labels` into class order and removes duplicates.
std::vector<std::string> canonical_label_set(
    const std::vector<std::string>& classes, std::vector<std::string> labels);

nlohmann::ordered_json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
// Crowd annotations and images left without annotations are dropped.
DatasetManifest parse_coco_json(const nlohmann::json& j,
                                std::string dataset_id = "coco");
DatasetManifest parse_classification_jsonl(std::string_view text,
                                           std::string dataset_id = "");

// Detects the format from the extension and top-level keys, then validates.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest);

}  // namespace osv

#endif  // OSV_MANIFEST_HPP_
