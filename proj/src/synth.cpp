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

#include "osv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "osv/error.hpp"
#include "osv/io_util.hpp"
#include "osv/negatives.hpp"
#include "osv/seeds.hpp"

namespace osv {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool normalize_in_place(Vec& v) {
  const double n = std::sqrt(dot(v, v));
  if (n < 1e-12) return false;
  for (double& x : v) x /= n;
  return true;
}

double angle_between_unit(const Vec& a, const Vec& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

Vec gaussian_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vec v(dim);
  for (double& x : v) x = z(rng);
  return v;
}

std::string label(const char* prefix, std::size_t i, int width = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
  return buf;
}

std::vector<Vec> class_directions(const WorldSpec& spec) {
  const std::size_t total = spec.class_count + spec.open_class_count;
  std::mt19937_64 rng(derive_seed(spec.seed, "synth.directions"));
  std::vector<Vec> dirs;
  constexpr double kRightAngle = 1.5707963267948966;
  if (spec.dim >= total && spec.margin <= kRightAngle) {
    // Random orthonormal set: every pairwise angle is exactly 90 degrees.
    while (dirs.size() < total) {
      Vec v = gaussian_vector(spec.dim, rng);
      for (const auto& d : dirs) {
        const double p = dot(v, d);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * d[i];
      }
      if (normalize_in_place(v)) dirs.push_back(std::move(v));
    }
    return dirs;
  }
  constexpr int kAttempts = 20000;
  while (dirs.size() < total) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      Vec v = gaussian_vector(spec.dim, rng);
      if (!normalize_in_place(v)) continue;
      placed = std::all_of(dirs.begin(), dirs.end(), [&](const Vec& d) {
        return angle_between_unit(v, d) >= spec.margin;
      });
      if (placed) dirs.push_back(std::move(v));
    }
    if (!placed)
      throw GeometryError("cannot place " + std::to_string(total) +
                          " directions with margin " +
                          std::to_string(spec.margin) + " in dim " +
                          std::to_string(spec.dim));
  }
  return dirs;
}

class ImageSampler {
 public:
  ImageSampler(const WorldSpec& spec, std::uint64_t seed)
      : spec_(spec), rng_(seed), noise_(0.0, spec.noise_std > 0 ? spec.noise_std : 1.0) {}

  Vec sample(const Vec& direction, double& angle_out) {
    constexpr int kAttempts = 1000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      Vec v = direction;
      if (spec_.noise_std > 0)
        for (double& x : v) x += noise_(rng_);
      if (!normalize_in_place(v)) continue;
      const double angle = angle_between_unit(v, direction);
      if (spec_.separable && angle >= spec_.margin / 4) continue;
      angle_out = angle;
      return v;
    }
    throw GeometryError("noise too large for the separable margin");
  }

 private:
  const WorldSpec& spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
};

void append(std::vector<float>& data, const Vec& v) {
  for (double x : v) data.push_back(static_cast<float>(x));
}

}  // namespace

WorldSpec WorldSpec::separable_preset(std::uint64_t seed) {
  WorldSpec spec;
  spec.seed = seed;
  return spec;
}

WorldSpec WorldSpec::overlap_preset(std::uint64_t seed) {
  WorldSpec spec;
  spec.class_count = 64;
  spec.open_class_count = 0;
  spec.dim = 16;
  spec.images_per_class = 20;
  spec.margin = 0.0;
  spec.noise_std = 0.5;
  spec.separable = false;
  spec.seed = seed;
  return spec;
}

WorldSpec WorldSpec::detection_preset(std::uint64_t seed) {
  WorldSpec spec;
  spec.task = Task::kDetection;
  spec.class_count = 6;
  spec.open_class_count = 2;
  spec.dim = 16;
  spec.seed = seed;
  return spec;
}

SyntheticWorld generate_world(const WorldSpec& spec) {
  if (spec.class_count == 0) throw ParameterError("need at least one class");
  if (spec.dim == 0) throw ParameterError("dim must be positive");
  if (spec.noise_std < 0) throw ParameterError("noise_std must be >= 0");
  if (spec.separable) {
    if (!(spec.margin > 6.0 * spec.noise_std * std::sqrt(double(spec.dim))))
      throw GeometryError(
          "separable worlds need margin > 6 * noise_std * sqrt(dim)");
  }
  const auto dirs = class_directions(spec);
  const std::size_t total = dirs.size();

  SyntheticWorld world;
  for (std::size_t c = 0; c < spec.class_count; ++c)
    world.direction_labels.push_back(label("class", c));
  for (std::size_t c = 0; c < spec.open_class_count; ++c) {
    world.direction_labels.push_back(label("open", c));
    world.open_labels.push_back(world.direction_labels.back());
  }

  std::vector<float> dir_data;
  for (const auto& d : dirs) append(dir_data, d);
  world.directions = EmbeddingMatrix(spec.dim, total, dir_data, true);
  world.queries = world.directions.prefix(spec.class_count);
  world.query_labels.assign(world.direction_labels.begin(),
                            world.direction_labels.begin() + spec.class_count);

  world.min_direction_angle = total > 1 ? 4.0 : 0.0;
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j)
      world.min_direction_angle =
          std::min(world.min_direction_angle, angle_between_unit(dirs[i], dirs[j]));

  auto& manifest = world.manifest;
  manifest.task = spec.task;
  manifest.dataset_id = spec.task == Task::kClassification ? "synth-cls" : "synth-det";
  manifest.classes = world.query_labels;

  ImageSampler sampler(spec, derive_seed(spec.seed, "synth.images"));
  std::vector<float> image_data;
  auto add_row = [&](std::size_t cls, const std::string& id,
                     std::optional<std::array<double, 4>> box) {
    double angle = 0.0;
    append(image_data, sampler.sample(dirs[cls], angle));
    world.max_perturbation_angle = std::max(world.max_perturbation_angle, angle);
    world.image_rows.push_back(SidecarEntry{id, box});
  };

  if (spec.task == Task::kClassification) {
    std::size_t n = 0;
    for (std::size_t cls = 0; cls < total; ++cls) {
      for (std::size_t k = 0; k < spec.images_per_class; ++k) {
        ImageEntry image;
        image.image_id = label("img", n++, 5);
        if (cls < spec.class_count)
          image.gt_labels = {world.direction_labels[cls]};
        else
          image.held_out_labels = {world.direction_labels[cls]};
        add_row(cls, image.image_id, std::nullopt);
        manifest.images.push_back(std::move(image));
      }
    }
  } else {
    if (spec.max_objects_per_image == 0 || spec.max_objects_per_image > 4)
      throw ParameterError("detection worlds hold 1..4 objects per image");
    std::mt19937_64 layout(derive_seed(spec.seed, "synth.layout"));
    std::uniform_int_distribution<std::size_t> objects(1, spec.max_objects_per_image);
    std::uniform_int_distribution<std::size_t> cls_pick(0, total - 1);
    std::uniform_int_distribution<int> jitter(-4, 4);
    for (std::size_t n = 0; n < spec.detection_images; ++n) {
      ImageEntry image;
      image.image_id = label("det", n, 5);
      std::array<std::size_t, 4> cells{0, 1, 2, 3};
      std::shuffle(cells.begin(), cells.end(), layout);
      const std::size_t count = objects(layout);
      std::vector<std::string> labels;
      for (std::size_t o = 0; o < count; ++o) {
        const std::size_t cls = cls_pick(layout);
        const double x0 = 100.0 * static_cast<double>(cells[o] % 2);
        const double y0 = 100.0 * static_cast<double>(cells[o] / 2);
        const Box truth{x0 + 10, y0 + 10, x0 + 90, y0 + 90};
        const std::array<double, 4> proposal{
            truth.x1 + jitter(layout), truth.y1 + jitter(layout),
            truth.x2 + jitter(layout), truth.y2 + jitter(layout)};
        if (cls < spec.class_count) {
          image.boxes.push_back(GtObject{world.direction_labels[cls], truth});
          labels.push_back(world.direction_labels[cls]);
        }
        add_row(cls, image.image_id, proposal);
      }
      image.gt_labels = canonical_label_set(manifest.classes, labels);
      manifest.images.push_back(std::move(image));
    }
  }
  world.images = EmbeddingMatrix(spec.dim, world.image_rows.size(),
                                 std::move(image_data), true);

  if (spec.word_count > 0) {
    world.words = random_words(spec.word_count,
                               derive_seed(spec.seed, "synth.words"));
    std::mt19937_64 rng(derive_seed(spec.seed, "synth.word_vectors"));
    std::vector<float> data;
    for (std::size_t w = 0; w < spec.word_count; ++w) {
      Vec v = gaussian_vector(spec.dim, rng);
      normalize_in_place(v);
      append(data, v);
    }
    world.word_negatives =
        EmbeddingMatrix(spec.dim, spec.word_count, std::move(data), true);
  }
  manifest.validate();
  return world;
}

nlohmann::ordered_json geometry_record(const WorldSpec& spec,
                                       const SyntheticWorld& world) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(spec.task));
  j["class_count"] = spec.class_count;
  j["open_class_count"] = spec.open_class_count;
  j["dim"] = spec.dim;
  j["images_per_class"] = spec.images_per_class;
  j["margin"] = round_sig9(spec.margin);
  j["noise_std"] = round_sig9(spec.noise_std);
  j["seed"] = spec.seed;
  j["separable"] = spec.separable;
  j["direction_labels"] = world.direction_labels;
  j["open_labels"] = world.open_labels;
  j["min_direction_angle"] = round_sig9(world.min_direction_angle);
  j["max_perturbation_angle"] = round_sig9(world.max_perturbation_angle);
  return j;
}

void write_world(const std::filesystem::path& dir, const WorldSpec& spec,
                 const SyntheticWorld& world) {
  std::filesystem::create_directories(dir);
  save_manifest(dir / "manifest.json", world.manifest);
  save_dump_file(dir / "images.osvd", world.images);
  write_sidecar(sidecar_path(dir / "images.osvd"), world.image_rows);
  save_dump_file(dir / "queries.osvd", world.queries);
  write_sidecar(sidecar_path(dir / "queries.osvd"),
                sidecar_from_ids(world.query_labels));
  save_dump_file(dir / "directions.osvd", world.directions);
  write_sidecar(sidecar_path(dir / "directions.osvd"),
                sidecar_from_ids(world.direction_labels));
  if (!world.words.empty()) {
    save_dump_file(dir / "words.osvd", world.word_negatives);
    write_sidecar(sidecar_path(dir / "words.osvd"),
                  sidecar_from_ids(world.words));
  }
  write_text_atomic(dir / "geometry.json",
                    geometry_record(spec, world).dump(2) + "\n");
}

}  // namespace osv
