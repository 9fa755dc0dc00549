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

#include "osv/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "osv/error.hpp"

namespace osv {
namespace {

double dot_normalized(std::span<const float> image, double inv_norm,
                      std::span<const float> query) {
  double sum = 0.0;
  bool zero_row = true;
  for (std::size_t d = 0; d < query.size(); ++d) {
    if (query[d] != 0.0f) zero_row = false;
    sum += static_cast<double>(image[d]) * query[d];
  }
  return zero_row ? 0.0 : sum * inv_norm;
}

double inverse_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return sum > 0.0 ? 1.0 / std::sqrt(sum) : 0.0;
}

void append_scores(std::span<const float> image, double inv_norm,
                   const EmbeddingMatrix& m, std::vector<double>& out) {
  if (m.empty()) return;
  if (m.dim() != image.size()) {
    throw ShapeError("image dim " + std::to_string(image.size()) +
                     " != query dim " + std::to_string(m.dim()));
  }
  for (std::size_t i = 0; i < m.count(); ++i)
    out.push_back(dot_normalized(image, inv_norm, m.row(i)));
}

}  // namespace

std::string_view to_string(Head head) {
  return head == Head::kSoftmax ? "softmax" : "sigmoid";
}

Head head_from_string(std::string_view name) {
  if (name == "softmax") return Head::kSoftmax;
  if (name == "sigmoid") return Head::kSigmoid;
  throw ParameterError("unknown head '" + std::string(name) + "'");
}

SimilarityRow cosine_scores(std::span<const float> image,
                            const EmbeddingMatrix& queries,
                            std::size_t negative_count) {
  if (negative_count > queries.count())
    throw ShapeError("more negative slots than rows");
  SimilarityRow row;
  row.scores.reserve(queries.count());
  append_scores(image, inverse_norm(image), queries, row.scores);
  row.query_count = queries.count() - negative_count;
  row.negative_count = negative_count;
  return row;
}

SimilarityRow cosine_scores(std::span<const float> image,
                            const EmbeddingMatrix& queries,
                            const EmbeddingMatrix& negatives) {
  const double inv_norm = inverse_norm(image);
  SimilarityRow row;
  row.scores.reserve(queries.count() + negatives.count());
  append_scores(image, inv_norm, queries, row.scores);
  append_scores(image, inv_norm, negatives, row.scores);
  row.query_count = queries.count();
  row.negative_count = negatives.count();
  return row;
}

SimilarityRow make_row(std::span<const float> scores,
                       std::size_t query_count) {
  if (query_count > scores.size())
    throw ShapeError("query count exceeds score columns");
  SimilarityRow row;
  row.scores.assign(scores.begin(), scores.end());
  row.query_count = query_count;
  row.negative_count = scores.size() - query_count;
  return row;
}

std::vector<double> softmax(std::span<const double> scores,
                            double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw ParameterError("temperature must be a positive finite number");
  if (scores.empty()) return {};
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("non-finite score in softmax");
    max_logit = std::max(max_logit, temperature * s);
  }
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(temperature * scores[i] - max_logit);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

double sigmoid(double score) {
  if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(),
                 [](double s) { return sigmoid(s); });
  return out;
}

double entropy_uncertainty(std::span<const double> probs) {
  if (probs.empty()) throw NumericError("empty distribution");
  double total = 0.0;
  double h = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw NumericError("distribution has a negative or non-finite entry");
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-5)
    throw NumericError("distribution sums to " + std::to_string(total));
  return -h;
}

PredictionDecision classify(const SimilarityRow& row, double temperature,
                            Head head) {
  if (row.scores.empty() || row.query_count == 0)
    throw ShapeError("classify needs at least one query slot");
  if (row.scores.size() != row.query_count + row.negative_count)
    throw ShapeError("row length != query_count + negative_count");

  const std::span<const double> all(row.scores);
  const auto queries = all.first(row.query_count);

  std::size_t best_query = 0;
  for (std::size_t i = 1; i < queries.size(); ++i)
    if (queries[i] > queries[best_query]) best_query = i;

  PredictionDecision decision;
  for (std::size_t j = 0; j < row.negative_count; ++j) {
    const double s = all[row.query_count + j];
    if (s >= queries[best_query] &&
        (!decision.negative_slot ||
         s > all[row.query_count + *decision.negative_slot]))
      decision.negative_slot = j;
  }
  if (!decision.negative_slot) decision.predicted_index = best_query;

  decision.psi.cosine = queries[best_query];
  if (head == Head::kSoftmax) {
    const auto probs = softmax(all, temperature);
    decision.psi.softmax =
        *std::max_element(probs.begin(), probs.begin() + row.query_count);
    decision.psi.entropy_neg = entropy_uncertainty(probs);
  } else {
    for (double s : queries)
      if (!std::isfinite(s)) throw NumericError("non-finite score");
    decision.psi.softmax = sigmoid(queries[best_query]);
    decision.psi.entropy_neg = std::numeric_limits<double>::quiet_NaN();
  }
  return decision;
}

}  // namespace osv
