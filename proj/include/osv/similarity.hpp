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

// Classification head in embedding space: similarity scores, activations,
// uncertainty measures and argmax decisions with optional negative slots.
//
// All uncertainty measures follow "higher means more certain", so a
// prediction is accepted when psi >= theta for every measure.

#ifndef OSV_SIMILARITY_HPP_
#define OSV_SIMILARITY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "osv/embedding_store.hpp"

namespace osv {

inline constexpr double kDefaultTemperature = 100.0;

enum class Head { kSoftmax, kSigmoid };

std::string_view to_string(Head head);
Head head_from_string(std::string_view name);

// Scores over the augmented query set: the query labels first, then the
// negative slots.
struct SimilarityRow {
  std::vector<double> scores;
  std::size_t query_count = 0;
  std::size_t negative_count = 0;
};

struct UncertaintyTriple {
  double cosine = 0.0;
  // Max softmax probability, or max sigmoid score for the sigmoid head.
  double softmax = 0.0;
  // Negated entropy of the softmax; NaN for the sigmoid head, whose scores
  // are not a distribution.
  double entropy_neg = 0.0;
};

struct PredictionDecision {
  // Index into the query labels; empty when a negative slot won.
  std::optional<std::size_t> predicted_index;
  // Index into the negative slots when the input was rejected.
  std::optional<std::size_t> negative_slot;
  UncertaintyTriple psi;

  bool rejected() const noexcept { return !predicted_index.has_value(); }
};

// score_i = dot(normalize(image), queries.row(i)). All-zero query rows score
// exactly 0.0. `queries` must be normalized.
SimilarityRow cosine_scores(std::span<const float> image,
                            const EmbeddingMatrix& queries,
                            std::size_t negative_count = 0);

// Same, with the negative rows kept in a separate matrix.
SimilarityRow cosine_scores(std::span<const float> image,
                            const EmbeddingMatrix& queries,
                            const EmbeddingMatrix& negatives);

SimilarityRow make_row(std::span<const float> scores, std::size_t query_count);

std::vector<double> softmax(std::span<const double> scores, double temperature);
std::vector<double> sigmoid(std::span<const double> scores);
double sigmoid(double score);

// -H(p) with natural log and 0 ln 0 = 0.
double entropy_uncertainty(std::span<const double> probs);

// Argmax over all slots. Lowest index wins among equal scores, except that a
// negative slot tied with the best query slot wins (conservative rejection).
// psi values are maxima over the query slots only; negatives take part in
// the softmax normalization.
PredictionDecision classify(const SimilarityRow& row, double temperature,
                            Head head);

}  // namespace osv

#endif  // OSV_SIMILARITY_HPP_
