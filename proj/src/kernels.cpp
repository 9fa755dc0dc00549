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

#include "osv/kernels.hpp"

#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "osv/error.hpp"

namespace osv::kernels {
namespace {

int g_workers = 0;

void check_dims(const EmbeddingMatrix& images,
                const EmbeddingMatrix& targets) {
  if (images.dim() != targets.dim() && !images.empty() && !targets.empty()) {
    throw ShapeError("image dim " + std::to_string(images.dim()) +
                     " != query dim " + std::to_string(targets.dim()));
  }
}

std::vector<double> inverse_norms(const EmbeddingMatrix& m) {
  std::vector<double> out(m.count());
  for (std::size_t i = 0; i < m.count(); ++i) {
    double sum = 0.0;
    for (float x : m.row(i)) sum += static_cast<double>(x) * x;
    out[i] = sum > 0.0 ? 1.0 / std::sqrt(sum) : 0.0;
  }
  return out;
}

std::vector<bool> zero_rows(const EmbeddingMatrix& m) {
  std::vector<bool> out(m.count(), true);
  for (std::size_t i = 0; i < m.count(); ++i)
    for (float x : m.row(i))
      if (x != 0.0f) {
        out[i] = false;
        break;
      }
  return out;
}

inline double cell(const float* image, const float* target, std::size_t dim,
                   double inv_norm) {
  double sum = 0.0;
  for (std::size_t d = 0; d < dim; ++d)
    sum += static_cast<double>(image[d]) * target[d];
  return sum * inv_norm;
}

SimilarityRow gather(const CosineMatrix& scores, const ClassifyJob& job) {
  const auto src = scores.row(job.row);
  SimilarityRow row;
  row.scores.reserve(job.query_cols.size() + job.negative_cols.size());
  for (std::size_t c : job.query_cols) row.scores.push_back(src[c]);
  for (std::size_t c : job.negative_cols) row.scores.push_back(src[c]);
  row.query_count = job.query_cols.size();
  row.negative_count = job.negative_cols.size();
  return row;
}

}  // namespace

CosineMatrix cosine_matrix_serial(const EmbeddingMatrix& images,
                                  const EmbeddingMatrix& targets) {
  check_dims(images, targets);
  CosineMatrix out{images.count(), targets.count(), {}};
  out.values.assign(out.rows * out.cols, 0.0);
  const auto inv = inverse_norms(images);
  const auto zero = zero_rows(targets);
  const std::size_t dim = images.dim();
  for (std::size_t i = 0; i < out.rows; ++i) {
    const float* image = images.data().data() + i * dim;
    for (std::size_t j = 0; j < out.cols; ++j) {
      if (zero[j]) continue;
      out.values[i * out.cols + j] =
          cell(image, targets.data().data() + j * dim, dim, inv[i]);
    }
  }
  return out;
}

CosineMatrix cosine_matrix_omp(const EmbeddingMatrix& images,
                               const EmbeddingMatrix& targets) {
  check_dims(images, targets);
  CosineMatrix out{images.count(), targets.count(), {}};
  out.values.assign(out.rows * out.cols, 0.0);
  const auto inv = inverse_norms(images);
  const auto zero = zero_rows(targets);
  const std::size_t dim = images.dim();
  const auto rows = static_cast<std::ptrdiff_t>(out.rows);
  const float* image_data = images.data().data();
  const float* target_data = targets.data().data();
  double* values = out.values.data();
  const std::size_t cols = out.cols;
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const float* image = image_data + static_cast<std::size_t>(i) * dim;
    for (std::size_t j = 0; j < cols; ++j) {
      if (zero[j]) continue;
      values[static_cast<std::size_t>(i) * cols + j] =
          cell(image, target_data + j * dim, dim, inv[i]);
    }
  }
  return out;
}

std::vector<PredictionDecision> classify_batch_serial(
    const CosineMatrix& scores, std::span<const ClassifyJob> jobs,
    double temperature, Head head) {
  std::vector<PredictionDecision> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs)
    out.push_back(classify(gather(scores, job), temperature, head));
  return out;
}

std::vector<PredictionDecision> classify_batch_omp(
    const CosineMatrix& scores, std::span<const ClassifyJob> jobs,
    double temperature, Head head) {
  std::vector<PredictionDecision> out(jobs.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = classify(gather(scores, jobs[i]), temperature, head);
    } catch (...) {
#pragma omp critical(osv_classify_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void set_worker_count(int workers) { g_workers = workers > 0 ? workers : 0; }

int worker_count() {
  return g_workers > 0 ? g_workers : omp_get_max_threads();
}

}  // namespace osv::kernels
