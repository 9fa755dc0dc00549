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

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "osv/kernels.hpp"

namespace osv {
namespace {

EmbeddingMatrix random_matrix(std::size_t dim, std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> z;
  std::vector<float> data(dim * count);
  for (float& x : data) x = z(rng);
  return EmbeddingMatrix(dim, count, std::move(data));
}

template <auto Kernel>
void BM_CosineMatrix(benchmark::State& state) {
  const auto images = random_matrix(512, state.range(0), 1);
  const auto targets = random_matrix(512, 1000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(images, targets));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}

template <auto Kernel>
void BM_ClassifyBatch(benchmark::State& state) {
  const std::size_t rows = state.range(0);
  const auto scores =
      kernels::cosine_matrix_serial(random_matrix(64, rows, 3), random_matrix(64, 200, 4));
  std::vector<std::size_t> queries(100), negatives(100);
  for (std::size_t i = 0; i < 100; ++i) {
    queries[i] = i;
    negatives[i] = 100 + i;
  }
  std::vector<kernels::ClassifyJob> jobs(rows);
  for (std::size_t r = 0; r < rows; ++r) jobs[r] = {r, queries, negatives};
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(scores, jobs, 0.01, Head::kSoftmax));
  state.SetItemsProcessed(state.iterations() * rows);
}

BENCHMARK(BM_CosineMatrix<kernels::cosine_matrix_serial>)->Arg(256)->Arg(2048);
BENCHMARK(BM_CosineMatrix<kernels::cosine_matrix_omp>)->Arg(256)->Arg(2048);
BENCHMARK(BM_ClassifyBatch<kernels::classify_batch_serial>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_ClassifyBatch<kernels::classify_batch_omp>)->Arg(1024)->Arg(16384);

}  // namespace
}  // namespace osv

BENCHMARK_MAIN();
