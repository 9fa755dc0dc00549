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

// Experiment runners: a full dual-pass evaluation, negative-count sweeps
// and query-set-size sweeps.
//
// Two kinds of model output are supported:
//   * embedding mode: one dump of image (or region proposal) embeddings and
//     one dump of query label embeddings; the engine scores any query
//     subset itself, including engine-generated negative slots.
//   * score mode: per (pass, image) score tables produced by a model whose
//     head is conditioned on the query set; extra columns beyond the pass's
//     query labels are the model's native negative slots.

#ifndef OSV_EXPERIMENTS_HPP_
#define OSV_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "osv/embedding_store.hpp"
#include "osv/manifest.hpp"
#include "osv/negatives.hpp"
#include "osv/protocol.hpp"
#include "osv/report.hpp"
#include "osv/similarity.hpp"

namespace osv {

struct EmbeddingSource {
  // One row per image (classification) or per region proposal (detection);
  // rows[i].id is the image id and rows[i].box the proposal box.
  EmbeddingMatrix images;
  std::vector<SidecarEntry> rows;
  // One normalized row per class label.
  EmbeddingMatrix queries;
  std::vector<std::string> query_labels;
  // Encoder output for word-based negatives, in word order.
  std::optional<EmbeddingMatrix> word_negatives;
};

EmbeddingSource load_embedding_source(
    const std::filesystem::path& images,
    const std::filesystem::path& queries,
    const std::optional<std::filesystem::path>& word_negatives = std::nullopt);

struct ScoredRegions {
  ScoreMatrix scores;
  std::vector<std::optional<Box>> boxes;
};

struct ScoreSource {
  std::map<std::string, ScoredRegions> closed;
  std::map<std::string, ScoredRegions> open;
};

// Reads <dir>/<pass>/<image_id>.osvd (+ .jsonl sidecar with proposal boxes)
// for every planned (image, pass); throws CoverageError listing gaps.
ScoreSource load_score_source(const std::filesystem::path& dir,
                              const PlanFile& plan);
void save_scored_regions(const std::filesystem::path& dir, Pass pass,
                         const std::string& image_id,
                         const ScoredRegions& regions);

struct EvalConfig {
  double temperature = kDefaultTemperature;
  Head head = Head::kSoftmax;
  std::size_t histogram_bins = 20;
  double iou_threshold = kDefaultIouThreshold;
  // Copied verbatim into the report metadata.
  nlohmann::ordered_json run_config = nlohmann::ordered_json::object();
};

struct EvalRun {
  EvalReport report;
  std::vector<PredictionOutcome> closed;
  std::vector<PredictionOutcome> open;
};

// Names of the uncertainty measures reported for a head.
std::vector<std::string> measure_names(Head head);

EvalRun run_eval(const DatasetManifest& manifest, const PlanFile& plan,
                 const EmbeddingSource& source, const EvalConfig& config);
EvalRun run_eval(const DatasetManifest& manifest, const PlanFile& plan,
                 const ScoreSource& source, const EvalConfig& config);

// Builds the plan and runs both passes (embedding mode).
EvalReport full_eval(const DatasetManifest& manifest,
                     const EmbeddingSource& source,
                     const NegativeSpec& negatives, const EvalConfig& config);

struct SeedSummary {
  std::uint64_t seed = 0;
  std::map<std::string, std::optional<double>> metrics;
};

struct SweepResult {
  std::string axis;
  std::size_t axis_value = 0;
  std::vector<SeedSummary> per_seed;
  std::map<std::string, std::optional<double>> mean;
  // Sample std (N-1); present only with two or more seeds.
  std::map<std::string, std::optional<double>> stddev;
};

struct SweepOutput {
  std::vector<SweepResult> results;
  // reports[i][s]: axis point i, seed s.
  std::vector<std::vector<EvalReport>> reports;
};

// Flattened scalar metrics of one report ("accuracy", "aupr.softmax", ...).
std::map<std::string, std::optional<double>> summarize(const EvalReport& report);

// Negative slots of `kind` at each count. Word-based runs use the first
// `count` rows of source.word_negatives; count 0 means no negatives.
SweepOutput sweep_negatives(const DatasetManifest& manifest,
                            const EmbeddingSource& source, NegativeKind kind,
                            std::span<const std::size_t> counts,
                            std::span<const std::uint64_t> seeds,
                            const EvalConfig& config);

// Per (size, seed): a uniform class subset of that size, images of other
// classes dropped, then a full evaluation with `negatives`.
SweepOutput sweep_query_size(const DatasetManifest& manifest,
                             const EmbeddingSource& source,
                             std::span<const std::size_t> sizes,
                             std::span<const std::uint64_t> seeds,
                             const NegativeSpec& negatives,
                             const EvalConfig& config);

// The first `size` classes of a seeded uniform shuffle, in dataset order.
std::vector<std::size_t> sample_class_subset(std::size_t class_count,
                                             std::size_t size,
                                             std::uint64_t seed);

nlohmann::ordered_json to_json(const SweepOutput& sweep);
// Long form: "axis,seed,metric,value".
std::string sweep_csv(const SweepOutput& sweep);

}  // namespace osv

#endif  // OSV_EXPERIMENTS_HPP_
