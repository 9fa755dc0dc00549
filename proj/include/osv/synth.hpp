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

// Seeded synthetic embedding worlds with known geometry. Class directions
// are unit vectors with a guaranteed minimum pairwise angle; image
// embeddings are directions plus isotropic Gaussian noise, renormalized.
// Queries are the directions of the first K classes; the remaining "open"
// classes are held out of the class list.

#ifndef OSV_SYNTH_HPP_
#define OSV_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "osv/embedding_store.hpp"
#include "osv/manifest.hpp"

namespace osv {

struct WorldSpec {
  Task task = Task::kClassification;
  std::size_t class_count = 8;
  std::size_t open_class_count = 4;
  std::size_t dim = 32;
  std::size_t images_per_class = 40;
  // Minimum angle (radians) between any two class directions.
  double margin = 1.5707963267948966;
  double noise_std = 0.02;
  std::uint64_t seed = 0;
  // Separable worlds require margin > 6 * noise_std * sqrt(dim) and redraw
  // any noise sample that moves an image more than margin/4 from its class
  // direction, so every image is strictly closer to its own direction than
  // to any other.
  bool separable = true;
  // Detection worlds: `detection_images` images, each with 1..max objects
  // of uniformly drawn classes on a non-overlapping 2x2 grid of 100 px
  // cells. Objects of held-out classes are unlabelled background.
  std::size_t detection_images = 60;
  std::size_t max_objects_per_image = 4;
  // Random unit vectors standing in for encoded random-word negatives.
  std::size_t word_count = 0;

  static WorldSpec separable_preset(std::uint64_t seed = 0);
  // Random directions in a low dimension with noise, so classes overlap and
  // confusions grow with the number of competing queries.
  static WorldSpec overlap_preset(std::uint64_t seed = 0);
  static WorldSpec detection_preset(std::uint64_t seed = 0);
};

struct SyntheticWorld {
  DatasetManifest manifest;
  EmbeddingMatrix images;
  std::vector<SidecarEntry> image_rows;
  EmbeddingMatrix queries;
  std::vector<std::string> query_labels;
  // All K + open directions, closed classes first.
  EmbeddingMatrix directions;
  std::vector<std::string> direction_labels;
  std::vector<std::string> open_labels;
  EmbeddingMatrix word_negatives;
  std::vector<std::string> words;
  // min pairwise direction angle and max image-to-own-direction angle.
  double min_direction_angle = 0.0;
  double max_perturbation_angle = 0.0;
};

SyntheticWorld generate_world(const WorldSpec& spec);

nlohmann::ordered_json geometry_record(const WorldSpec& spec,
                                       const SyntheticWorld& world);

// manifest.json, images.osvd, queries.osvd, directions.osvd (+ sidecars),
// words.osvd when word_count > 0, and geometry.json.
void write_world(const std::filesystem::path& dir, const WorldSpec& spec,
                 const SyntheticWorld& world);

}  // namespace osv

#endif  // OSV_SYNTH_HPP_
