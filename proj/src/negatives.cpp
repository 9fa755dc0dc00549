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

#include "osv/negatives.hpp"

#include <cmath>
#include <random>

#include "osv/error.hpp"

namespace osv {

std::string_view to_string(NegativeKind kind) {
  switch (kind) {
    case NegativeKind::kNone: return "none";
    case NegativeKind::kSimpleWord: return "simple-word";
    case NegativeKind::kRandomWords: return "random-words";
    case NegativeKind::kZeroEmbedding: return "zero";
    case NegativeKind::kRandomEmbeddings: return "random-embeddings";
  }
  return "none";
}

NegativeKind negative_kind_from_string(std::string_view name) {
  for (auto kind : {NegativeKind::kNone, NegativeKind::kSimpleWord,
                    NegativeKind::kRandomWords, NegativeKind::kZeroEmbedding,
                    NegativeKind::kRandomEmbeddings}) {
    if (name == to_string(kind)) return kind;
  }
  throw ParameterError("unknown negative kind '" + std::string(name) + "'");
}

void NegativeSpec::validate() const {
  const std::string name(to_string(kind));
  if ((count == 0) != (kind == NegativeKind::kNone))
    throw ValidationError("negative count must be 0 iff kind is none (kind=" +
                          name + ", count=" + std::to_string(count) + ")");
  if ((kind == NegativeKind::kSimpleWord ||
       kind == NegativeKind::kZeroEmbedding) &&
      count != 1)
    throw ValidationError(name + " negatives have exactly one slot");
  if (fit && kind != NegativeKind::kRandomEmbeddings)
    throw ValidationError("a fitted Gaussian only applies to random-embeddings");
  if (fit && fit->mean.size() != fit->stddev.size())
    throw ValidationError("fitted mean and std differ in length");
}

NegativeSpec make_negative_spec(NegativeKind kind, std::size_t count,
                                std::uint64_t seed) {
  NegativeSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  switch (kind) {
    case NegativeKind::kNone: spec.count = 0; break;
    case NegativeKind::kSimpleWord:
    case NegativeKind::kZeroEmbedding: spec.count = 1; break;
    default: spec.count = count; break;
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json to_json(const NegativeSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["count"] = spec.count;
  j["seed"] = spec.seed;
  if (spec.kind == NegativeKind::kRandomEmbeddings) {
    j["covariance"] = "diagonal";
    j["normalized_after_sampling"] = true;
  }
  return j;
}

NegativeSpec negative_spec_from_json(const nlohmann::json& j) {
  try {
    NegativeSpec spec;
    spec.kind = negative_kind_from_string(j.at("kind").get<std::string>());
    spec.count = j.at("count").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad negative spec: ") + e.what());
  }
}

EmbeddingMatrix zero_embedding(std::size_t dim) {
  if (dim == 0) throw ParameterError("dim must be positive");
  return EmbeddingMatrix(dim, 1, std::vector<float>(dim, 0.0f), true);
}

GaussianFit fit_query_distribution(const EmbeddingMatrix& queries) {
  const std::size_t n = queries.count();
  if (n < 2)
    throw InsufficientDataError(
        "random embeddings need >= 2 query rows to estimate a std");
  const std::size_t dim = queries.dim();
  GaussianFit fit{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = queries.row(i);
    for (std::size_t d = 0; d < dim; ++d) fit.mean[d] += r[d];
  }
  for (double& m : fit.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = queries.row(i);
    for (std::size_t d = 0; d < dim; ++d) {
      const double dev = r[d] - fit.mean[d];
      fit.stddev[d] += dev * dev;
    }
  }
  for (double& s : fit.stddev) s = std::sqrt(s / static_cast<double>(n - 1));
  return fit;
}

EmbeddingMatrix sample_gaussian(const GaussianFit& fit, std::size_t m,
                                std::uint64_t seed) {
  const std::size_t dim = fit.mean.size();
  if (dim == 0 || fit.stddev.size() != dim)
    throw ParameterError("malformed Gaussian fit");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<float> data(m * dim);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t d = 0; d < dim; ++d)
      data[i * dim + d] =
          static_cast<float>(fit.mean[d] + fit.stddev[d] * standard(rng));
  return EmbeddingMatrix(dim, m, std::move(data), false);
}

EmbeddingMatrix random_embeddings(const EmbeddingMatrix& queries,
                                  std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ParameterError("need at least one random embedding");
  return l2_normalize(sample_gaussian(fit_query_distribution(queries), m, seed));
}

std::vector<std::string> random_words(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ParameterError("need at least one random word");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(2, 8);
  std::uniform_int_distribution<int> letter(0, 25);
  std::vector<std::string> words;
  words.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::string w(static_cast<std::size_t>(length(rng)), 'a');
    for (char& c : w) c = static_cast<char>('a' + letter(rng));
    words.push_back(std::move(w));
  }
  return words;
}

std::string simple_word() { return "This is a photo."; }

EmbeddingMatrix materialize_negatives(
    const NegativeSpec& spec, const EmbeddingMatrix& queries,
    const std::optional<EmbeddingMatrix>& word_dump) {
  spec.validate();
  switch (spec.kind) {
    case NegativeKind::kNone:
      return EmbeddingMatrix(queries.dim(), 0, {}, true);
    case NegativeKind::kZeroEmbedding:
      return zero_embedding(queries.dim());
    case NegativeKind::kRandomEmbeddings:
      if (spec.fit)
        return l2_normalize(sample_gaussian(*spec.fit, spec.count, spec.seed));
      return random_embeddings(queries, spec.count, spec.seed);
    case NegativeKind::kSimpleWord:
    case NegativeKind::kRandomWords:
      break;
  }
  if (!word_dump)
    throw CoverageError(std::string(to_string(spec.kind)) +
                        " negatives need an encoded word dump");
  if (word_dump->count() < spec.count)
    throw CoverageError("word dump has " + std::to_string(word_dump->count()) +
                        " rows but " + std::to_string(spec.count) +
                        " negatives were requested");
  if (word_dump->dim() != queries.dim())
    throw ShapeError("word dump dim differs from query dim");
  return l2_normalize(word_dump->prefix(spec.count));
}

}  // namespace osv
