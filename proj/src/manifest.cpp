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

#include "osv/manifest.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "osv/error.hpp"
#include "osv/io_util.hpp"

namespace osv {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw FormatError("ids must be strings or integers");
}

Box box_from_json(const json& b) {
  if (!b.is_array() || b.size() != 4)
    throw FormatError("box must be a 4-element array");
  return Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
             b[3].get<double>()};
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::kClassification ? "classification" : "detection";
}

Task task_from_string(std::string_view name) {
  if (name == "classification") return Task::kClassification;
  if (name == "detection") return Task::kDetection;
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

std::vector<std::string> canonical_label_set(
    const std::vector<std::string>& classes, std::vector<std::string> labels) {
  std::unordered_map<std::string_view, std::size_t> rank;
  for (std::size_t i = 0; i < classes.size(); ++i) rank.emplace(classes[i], i);
  auto key = [&](const std::string& l) {
    auto it = rank.find(l);
    return it == rank.end() ? classes.size() : it->second;
  };
  std::stable_sort(labels.begin(), labels.end(),
                   [&](const std::string& a, const std::string& b) {
                     const auto ka = key(a), kb = key(b);
                     return ka != kb ? ka < kb : a < b;
                   });
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

void DatasetManifest::validate() const {
  std::unordered_set<std::string_view> class_set;
  for (const auto& c : classes)
    if (!class_set.insert(c).second)
      throw ValidationError("duplicate class label '" + c + "'");
  if (classes.empty()) throw ValidationError("manifest has no classes");

  std::unordered_set<std::string_view> ids;
  for (const auto& image : images) {
    const std::string where = "image '" + image.image_id + "'";
    if (!ids.insert(image.image_id).second)
      throw ValidationError("duplicate " + where);
    for (const auto& l : image.gt_labels)
      if (!class_set.count(l))
        throw ValidationError(where + " has unknown label '" + l + "'");
    for (const auto& l : image.held_out_labels)
      if (class_set.count(l))
        throw ValidationError(where + " lists class '" + l +
                              "' as held out, but it is in the class list");
    if (task == Task::kClassification) {
      if (image.gt_labels.size() + image.held_out_labels.size() != 1)
        throw ValidationError(where + " must have exactly one label");
      if (!image.boxes.empty())
        throw ValidationError(where + ": classification images carry no boxes");
    } else {
      std::vector<std::string> box_labels;
      for (const auto& obj : image.boxes) {
        if (!class_set.count(obj.label))
          throw ValidationError(where + " has a box with unknown label '" +
                                obj.label + "'");
        if (!obj.box.valid())
          throw ValidationError(where + " has a degenerate box");
        box_labels.push_back(obj.label);
      }
      if (canonical_label_set(classes, box_labels) !=
          canonical_label_set(classes, image.gt_labels))
        throw ValidationError(where + ": label set differs from box labels");
    }
  }
}

std::optional<std::size_t> DatasetManifest::class_index(
    std::string_view label) const {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

const ImageEntry* DatasetManifest::find_image(std::string_view image_id) const {
  for (const auto& image : images)
    if (image.image_id == image_id) return &image;
  return nullptr;
}

std::unordered_map<std::string, std::size_t> DatasetManifest::class_lookup()
    const {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < classes.size(); ++i) out.emplace(classes[i], i);
  return out;
}

ordered_json to_json(const DatasetManifest& manifest) {
  ordered_json j;
  j["task"] = std::string(to_string(manifest.task));
  j["dataset_id"] = manifest.dataset_id;
  j["classes"] = manifest.classes;
  ordered_json images = ordered_json::array();
  for (const auto& image : manifest.images) {
    ordered_json e;
    e["image_id"] = image.image_id;
    e["labels"] = image.gt_labels;
    if (!image.held_out_labels.empty())
      e["held_out_labels"] = image.held_out_labels;
    if (manifest.task == Task::kDetection) {
      ordered_json boxes = ordered_json::array();
      for (const auto& obj : image.boxes)
        boxes.push_back({{"label", obj.label},
                         {"box", {obj.box.x1, obj.box.y1, obj.box.x2,
                                  obj.box.y2}}});
      e["boxes"] = std::move(boxes);
    }
    images.push_back(std::move(e));
  }
  j["images"] = std::move(images);
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.task = task_from_string(j.at("task").get<std::string>());
    m.dataset_id = j.value("dataset_id", std::string());
    m.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& e : j.at("images")) {
      ImageEntry image;
      image.image_id = id_string(e.at("image_id"));
      if (e.contains("boxes")) {
        for (const auto& b : e["boxes"])
          image.boxes.push_back(
              GtObject{b.at("label").get<std::string>(), box_from_json(b.at("box"))});
      }
      if (e.contains("labels")) {
        image.gt_labels = e["labels"].get<std::vector<std::string>>();
      } else if (e.contains("label")) {
        image.gt_labels = {e["label"].get<std::string>()};
      } else {
        for (const auto& obj : image.boxes) image.gt_labels.push_back(obj.label);
      }
      image.gt_labels = canonical_label_set(m.classes, image.gt_labels);
      if (e.contains("held_out_labels"))
        image.held_out_labels =
            e["held_out_labels"].get<std::vector<std::string>>();
      m.images.push_back(std::move(image));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

DatasetManifest parse_coco_json(const json& j, std::string dataset_id) {
  try {
    DatasetManifest m;
    m.task = Task::kDetection;
    m.dataset_id = std::move(dataset_id);
    std::map<long long, std::string> category_names;
    for (const auto& c : j.at("categories")) {
      const auto name = c.at("name").get<std::string>();
      category_names.emplace(c.at("id").get<long long>(), name);
      m.classes.push_back(name);
    }
    std::vector<std::string> order;
    std::unordered_map<std::string, ImageEntry> by_id;
    for (const auto& img : j.at("images")) {
      const auto id = id_string(img.at("id"));
      order.push_back(id);
      by_id[id].image_id = id;
    }
    for (const auto& ann : j.at("annotations")) {
      if (ann.value("iscrowd", 0) != 0) continue;
      const auto image_id = id_string(ann.at("image_id"));
      auto img = by_id.find(image_id);
      if (img == by_id.end())
        throw ValidationError("annotation for unknown image " + image_id);
      const auto cat = ann.at("category_id").get<long long>();
      auto name = category_names.find(cat);
      if (name == category_names.end())
        throw ValidationError("annotation with unknown category " +
                              std::to_string(cat));
      const auto& b = ann.at("bbox");
      if (!b.is_array() || b.size() != 4)
        throw FormatError("bbox must be [x, y, w, h]");
      img->second.boxes.push_back(GtObject{
          name->second, Box::from_xywh(b[0].get<double>(), b[1].get<double>(),
                                       b[2].get<double>(), b[3].get<double>())});
    }
    for (const auto& id : order) {
      auto& image = by_id[id];
      if (image.boxes.empty()) continue;
      std::vector<std::string> labels;
      for (const auto& obj : image.boxes) labels.push_back(obj.label);
      image.gt_labels = canonical_label_set(m.classes, std::move(labels));
      m.images.push_back(std::move(image));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed COCO annotations: ") + e.what());
  }
}

DatasetManifest parse_classification_jsonl(std::string_view text,
                                           std::string dataset_id) {
  DatasetManifest m;
  m.task = Task::kClassification;
  m.dataset_id = std::move(dataset_id);
  bool declared = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("classes")) {
      if (declared || !m.images.empty())
        throw FormatError("the classes line must come first");
      m.classes = j["classes"].get<std::vector<std::string>>();
      if (j.contains("dataset_id"))
        m.dataset_id = j["dataset_id"].get<std::string>();
      declared = true;
      continue;
    }
    if (!j.contains("image_id") || !j.contains("label") ||
        !j["label"].is_string())
      throw FormatError("line " + std::to_string(lineno) +
                        ": expected {\"image_id\", \"label\"}");
    ImageEntry image;
    image.image_id = id_string(j["image_id"]);
    const auto label = j["label"].get<std::string>();
    image.gt_labels = {label};
    if (!declared &&
        std::find(m.classes.begin(), m.classes.end(), label) == m.classes.end())
      m.classes.push_back(label);
    m.images.push_back(std::move(image));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  DatasetManifest m;
  if (path.extension() == ".jsonl") {
    m = parse_classification_jsonl(text, path.stem().string());
  } else {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("annotations"))
      m = parse_coco_json(j, path.stem().string());
    else
      m = manifest_from_json(j);
  }
  m.validate();
  return m;
}

void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest) {
  write_text_atomic(path, to_json(manifest).dump(2) + "\n");
}

}  // namespace osv
