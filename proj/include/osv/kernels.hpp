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

// Data-parallel scoring kernels. Each kernel has a serial reference and an
// OpenMP version; both compute every element with the same arithmetic, so
// their outputs are bit-identical and the serial one serves as test oracle.

#ifndef OSV_KERNELS_HPP_
#define OSV_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "osv/embedding_store.hpp"
#include "osv/similarity.hpp"

namespace osv::kernels {

// Row-major (images.count() x targets.count()) matrix of cosine scores,
// with the same conventions as cosine_scores().
struct CosineMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

CosineMatrix cosine_matrix_serial(const EmbeddingMatrix& images,
                                  const EmbeddingMatrix& targets);
CosineMatrix cosine_matrix_omp(const EmbeddingMatrix& images,
                               const EmbeddingMatrix& targets);

// One prediction to make: a row of a score table plus the columns that form
// its query set and its negative slots, in slot order.
struct ClassifyJob {
  std::size_t row = 0;
  std::span<const std::size_t> query_cols;
  std::span<const std::size_t> negative_cols;
};

std::vector<PredictionDecision> classify_batch_serial(
    const CosineMatrix& scores, std::span<const ClassifyJob> jobs,
    double temperature, Head head);
std::vector<PredictionDecision> classify_batch_omp(
    const CosineMatrix& scores, std::span<const ClassifyJob> jobs,
    double temperature, Head head);

// Worker count used by the _omp kernels (and the experiment runners).
void set_worker_count(int workers);
int worker_count();

}  // namespace osv::kernels

#endif  // OSV_KERNELS_HPP_
