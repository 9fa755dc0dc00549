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

// Negative query strategies: extra "unknown" slots appended to the query
// set. Word-based strategies only produce strings; their embeddings come
// back from the text encoder as OSVD dumps.

#ifndef OSV_NEGATIVES_HPP_
#define OSV_NEGATIVES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "osv/embedding_store.hpp"

namespace osv {

enum class NegativeKind {
  kNone,
  kSimpleWord,
  kRandomWords,
  kZeroEmbedding,
  kRandomEmbeddings,
};

std::string_view to_string(NegativeKind kind);
NegativeKind negative_kind_from_string(std::string_view name);

// Per-dimension Gaussian fitted to the query embeddings (diagonal
// covariance, sample std with N-1 denominator).
struct GaussianFit {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct NegativeSpec {
  NegativeKind kind = NegativeKind::kNone;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::optional<GaussianFit> fit;

  // Throws ValidationError when the kind/count/fit combination is invalid.
  void validate() const;
  bool word_based() const {
    return kind == NegativeKind::kSimpleWord ||
           kind == NegativeKind::kRandomWords;
  }
};

// Fills count for the single-slot kinds, so {zero} and {zero, 1} agree.
NegativeSpec make_negative_spec(NegativeKind kind, std::size_t count,
                                std::uint64_t seed);

nlohmann::ordered_json to_json(const NegativeSpec& spec);
NegativeSpec negative_spec_from_json(const nlohmann::json& j);

EmbeddingMatrix zero_embedding(std::size_t dim);

GaussianFit fit_query_distribution(const EmbeddingMatrix& queries);
// Raw draws e_d = mean_d + stddev_d * z with z ~ N(0, 1), not normalized.
EmbeddingMatrix sample_gaussian(const GaussianFit& fit, std::size_t m,
                                std::uint64_t seed);
// Fitted to `queries`, sampled, then L2-normalized onto the unit sphere.
EmbeddingMatrix random_embeddings(const EmbeddingMatrix& queries,
                                  std::size_t m, std::uint64_t seed);

// Lowercase a-z strings with length uniform in [2, 8].
std::vector<std::string> random_words(std::size_t m, std::uint64_t seed);
std::string simple_word();

// The negative slots for a run. `word_dump` holds encoder output for
// word-based kinds; its first `spec.count` rows are used.
EmbeddingMatrix materialize_negatives(
    const NegativeSpec& spec, const EmbeddingMatrix& queries,
    const std::optional<EmbeddingMatrix>& word_dump);

}  // namespace osv

#endif  // OSV_NEGATIVES_HPP_
