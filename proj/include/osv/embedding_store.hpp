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

// Dense f32 embedding / score matrices and the OSVD binary dump format.
//
// OSVD layout (all integers little-endian):
//   offset  size  field
//        0     4  magic "OSVD"
//        4     4  version (u32) = 1
//        8     1  dtype (u8) = 1, f32
//        9     3  reserved, zero
//       12     4  dim (u32), columns per row
//       16     8  count (u64), rows
//       24     1  flags (u8), bit0 = rows are L2-normalized
//       25     7  reserved, zero
//       32     -  payload: count * dim f32 LE, row-major
//
// Each dump may have a JSON-lines sidecar mapping row index to a record id.

#ifndef OSV_EMBEDDING_STORE_HPP_
#define OSV_EMBEDDING_STORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osv {

inline constexpr std::size_t kDumpHeaderBytes = 32;
inline constexpr std::uint32_t kDumpVersion = 1;

// Rows whose norm is within this distance of 1.0 count as unit rows.
inline constexpr double kUnitNormTolerance = 1e-4;

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws ShapeError if data.size() != dim * count or dim == 0, and
  // ValidationError if `normalized` is set but a nonzero row is not unit norm.
  EmbeddingMatrix(std::size_t dim, std::size_t count, std::vector<float> data,
                  bool normalized = false);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  bool normalized() const noexcept { return normalized_; }
  bool empty() const noexcept { return count_ == 0; }

  std::span<const float> row(std::size_t i) const;
  std::span<const float> data() const noexcept { return data_; }

  // Copies the selected rows (in the given order) into a new matrix.
  EmbeddingMatrix select_rows(std::span<const std::size_t> rows) const;
  // First n rows.
  EmbeddingMatrix prefix(std::size_t n) const;

  static EmbeddingMatrix concat(const EmbeddingMatrix& top,
                                const EmbeddingMatrix& bottom);

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&);

 private:
  std::size_t dim_ = 1;
  std::size_t count_ = 0;
  std::vector<float> data_;
  bool normalized_ = false;
};

// Bitwise equality of payloads (distinguishes -0.0 from 0.0, NaN payloads).
bool bit_identical(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

// Raw per-class scores of score-mode models: rows are predictions, columns
// are the plan's query labels followed by any model-native negative slots.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data).subspan(i * cols, cols);
  }
};

std::uint64_t save_dump(const EmbeddingMatrix& matrix, std::ostream& sink);
std::uint64_t save_dump(const ScoreMatrix& matrix, std::ostream& sink);
EmbeddingMatrix load_dump(std::istream& source);
ScoreMatrix load_score_dump(std::istream& source);

void save_dump_file(const std::filesystem::path& path,
                    const EmbeddingMatrix& matrix);
void save_dump_file(const std::filesystem::path& path,
                    const ScoreMatrix& matrix);
EmbeddingMatrix load_dump_file(const std::filesystem::path& path);
ScoreMatrix load_score_dump_file(const std::filesystem::path& path);

// Each nonzero row divided by its L2 norm; zero rows pass through unchanged.
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix);

// One sidecar line: {"row": i, "id": "...", "box": [x1, y1, x2, y2]}.
// The box is present only for detection proposals.
struct SidecarEntry {
  std::string id;
  std::optional<std::array<double, 4>> box;
};

std::filesystem::path sidecar_path(const std::filesystem::path& dump);
void write_sidecar(const std::filesystem::path& path,
                   std::span<const SidecarEntry> entries);
// Entries are returned in row order; throws FormatError on gaps, duplicates
// or malformed lines.
std::vector<SidecarEntry> read_sidecar(const std::filesystem::path& path);

// Convenience for the common "one id per row" case.
std::vector<SidecarEntry> sidecar_from_ids(std::span<const std::string> ids);

}  // namespace osv

#endif  // OSV_EMBEDDING_STORE_HPP_
