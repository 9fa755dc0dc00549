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

#include "osv/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "osv/error.hpp"
#include "osv/io_util.hpp"

namespace osv {
namespace {

constexpr char kMagic[4] = {'O', 'S', 'V', 'D'};
constexpr std::uint8_t kDtypeF32 = 1;
constexpr std::uint8_t kFlagNormalized = 0x1;

double row_norm(std::span<const float> row) {
  double sum = 0.0;
  for (float v : row) sum += static_cast<double>(v) * v;
  return std::sqrt(sum);
}

bool all_zero(std::span<const float> row) {
  for (float v : row)
    if (v != 0.0f) return false;
  return true;
}

template <typename T>
void put_le(std::uint8_t* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out[i] = static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF);
}

template <typename T>
T get_le(const std::uint8_t* in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(in[i]) << (8 * i);
  return value;
}

// Tracks the byte offset so failures can report where the sink gave up.
class CountingWriter {
 public:
  explicit CountingWriter(std::ostream& out) : out_(out) {}

  void write(const std::uint8_t* bytes, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(bytes),
               static_cast<std::streamsize>(n));
    if (!out_) {
      throw IoError("dump write failed at byte offset " +
                    std::to_string(offset_));
    }
    offset_ += n;
  }
  std::uint64_t offset() const { return offset_; }

 private:
  std::ostream& out_;
  std::uint64_t offset_ = 0;
};

std::uint64_t write_dump(std::ostream& sink, std::size_t dim,
                         std::size_t count, std::span<const float> payload,
                         bool normalized) {
  std::array<std::uint8_t, kDumpHeaderBytes> header{};
  std::memcpy(header.data(), kMagic, 4);
  put_le<std::uint32_t>(header.data() + 4, kDumpVersion);
  header[8] = kDtypeF32;
  put_le<std::uint32_t>(header.data() + 12, static_cast<std::uint32_t>(dim));
  put_le<std::uint64_t>(header.data() + 16, static_cast<std::uint64_t>(count));
  header[24] = normalized ? kFlagNormalized : 0;

  CountingWriter writer(sink);
  writer.write(header.data(), header.size());

  constexpr std::size_t kChunk = 4096;
  std::array<std::uint8_t, kChunk * 4> buf;
  for (std::size_t start = 0; start < payload.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, payload.size() - start);
    for (std::size_t i = 0; i < n; ++i)
      put_le<std::uint32_t>(buf.data() + 4 * i,
                            std::bit_cast<std::uint32_t>(payload[start + i]));
    writer.write(buf.data(), 4 * n);
  }
  return writer.offset();
}

struct RawDump {
  std::size_t dim = 0;
  std::size_t count = 0;
  bool normalized = false;
  std::vector<float> payload;
};

RawDump read_dump(std::istream& source) {
  std::array<std::uint8_t, kDumpHeaderBytes> header{};
  source.read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = static_cast<std::size_t>(source.gcount());
  if (got < 4 || std::memcmp(header.data(), kMagic, 4) != 0)
    throw FormatError("bad magic: not an OSVD dump");
  if (got < kDumpHeaderBytes) {
    throw CorruptionError("truncated header: expected " +
                          std::to_string(kDumpHeaderBytes) + " bytes, got " +
                          std::to_string(got));
  }
  const auto version = get_le<std::uint32_t>(header.data() + 4);
  if (version != kDumpVersion)
    throw FormatError("unsupported OSVD version " + std::to_string(version));
  if (header[8] != kDtypeF32)
    throw FormatError("unsupported dtype " + std::to_string(header[8]));

  RawDump dump;
  dump.dim = get_le<std::uint32_t>(header.data() + 12);
  const auto count = get_le<std::uint64_t>(header.data() + 16);
  dump.normalized = (header[24] & kFlagNormalized) != 0;
  if (dump.dim == 0) throw FormatError("dim must be positive");

  const std::uint64_t max_elems = std::uint64_t{1} << 40;
  if (count > max_elems / dump.dim)
    throw FormatError("declared size is implausibly large");
  dump.count = static_cast<std::size_t>(count);

  const std::uint64_t expected_bytes =
      static_cast<std::uint64_t>(dump.count) * dump.dim * 4;
  std::vector<std::uint8_t> bytes;
  // Read in bounded chunks so a lying header cannot force a huge allocation.
  std::uint64_t read_total = 0;
  constexpr std::size_t kChunk = 1 << 20;
  while (read_total < expected_bytes) {
    const auto want = static_cast<std::size_t>(
        std::min<std::uint64_t>(kChunk, expected_bytes - read_total));
    bytes.resize(static_cast<std::size_t>(read_total) + want);
    source.read(reinterpret_cast<char*>(bytes.data() + read_total),
                static_cast<std::streamsize>(want));
    const auto n = static_cast<std::uint64_t>(source.gcount());
    read_total += n;
    if (n < want) break;
  }
  if (read_total != expected_bytes) {
    throw CorruptionError("truncated payload: expected " +
                          std::to_string(expected_bytes) + " bytes, got " +
                          std::to_string(read_total));
  }
  dump.payload.resize(dump.count * dump.dim);
  for (std::size_t i = 0; i < dump.payload.size(); ++i)
    dump.payload[i] =
        std::bit_cast<float>(get_le<std::uint32_t>(bytes.data() + 4 * i));
  return dump;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::size_t count,
                                 std::vector<float> data, bool normalized)
    : dim_(dim), count_(count), data_(std::move(data)),
      normalized_(normalized) {
  if (dim_ == 0) throw ShapeError("embedding dim must be positive");
  if (data_.size() != dim_ * count_) {
    throw ShapeError("embedding data length " + std::to_string(data_.size()) +
                     " != dim*count " + std::to_string(dim_ * count_));
  }
  if (normalized_) {
    for (std::size_t i = 0; i < count_; ++i) {
      const auto r = row(i);
      if (all_zero(r)) continue;
      if (std::abs(row_norm(r) - 1.0) > kUnitNormTolerance) {
        throw ValidationError("row " + std::to_string(i) +
                              " is flagged normalized but has norm " +
                              std::to_string(row_norm(r)));
      }
    }
  }
}

std::span<const float> EmbeddingMatrix::row(std::size_t i) const {
  if (i >= count_) throw ShapeError("row index out of range");
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

EmbeddingMatrix EmbeddingMatrix::select_rows(
    std::span<const std::size_t> rows) const {
  std::vector<float> out;
  out.reserve(rows.size() * dim_);
  for (std::size_t r : rows) {
    const auto src = row(r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return EmbeddingMatrix(dim_, rows.size(), std::move(out), normalized_);
}

EmbeddingMatrix EmbeddingMatrix::prefix(std::size_t n) const {
  if (n > count_) throw ShapeError("prefix longer than matrix");
  return EmbeddingMatrix(
      dim_, n, std::vector<float>(data_.begin(), data_.begin() + n * dim_),
      normalized_);
}

EmbeddingMatrix EmbeddingMatrix::concat(const EmbeddingMatrix& top,
                                        const EmbeddingMatrix& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  if (top.dim() != bottom.dim())
    throw ShapeError("cannot stack matrices of different dim");
  std::vector<float> data(top.data_.begin(), top.data_.end());
  data.insert(data.end(), bottom.data_.begin(), bottom.data_.end());
  return EmbeddingMatrix(top.dim(), top.count() + bottom.count(),
                         std::move(data),
                         top.normalized() && bottom.normalized());
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  return a.dim_ == b.dim_ && a.count_ == b.count_ &&
         a.normalized_ == b.normalized_ && a.data_ == b.data_;
}

bool bit_identical(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.dim() != b.dim() || a.count() != b.count() ||
      a.normalized() != b.normalized())
    return false;
  const auto da = a.data();
  const auto db = b.data();
  return da.size() == db.size() &&
         std::memcmp(da.data(), db.data(), da.size() * sizeof(float)) == 0;
}

std::uint64_t save_dump(const EmbeddingMatrix& matrix, std::ostream& sink) {
  return write_dump(sink, matrix.dim(), matrix.count(), matrix.data(),
                    matrix.normalized());
}

std::uint64_t save_dump(const ScoreMatrix& matrix, std::ostream& sink) {
  if (matrix.cols == 0) throw ShapeError("score matrix needs >= 1 column");
  if (matrix.data.size() != matrix.rows * matrix.cols)
    throw ShapeError("score matrix is not rectangular");
  return write_dump(sink, matrix.cols, matrix.rows, matrix.data, false);
}

EmbeddingMatrix load_dump(std::istream& source) {
  RawDump raw = read_dump(source);
  return EmbeddingMatrix(raw.dim, raw.count, std::move(raw.payload),
                         raw.normalized);
}

ScoreMatrix load_score_dump(std::istream& source) {
  RawDump raw = read_dump(source);
  for (float v : raw.payload)
    if (!std::isfinite(v)) throw NumericError("non-finite score in dump");
  return ScoreMatrix{raw.count, raw.dim, std::move(raw.payload)};
}

void save_dump_file(const std::filesystem::path& path,
                    const EmbeddingMatrix& matrix) {
  write_file_atomic(path, [&](std::ostream& out) { save_dump(matrix, out); });
}

void save_dump_file(const std::filesystem::path& path,
                    const ScoreMatrix& matrix) {
  write_file_atomic(path, [&](std::ostream& out) { save_dump(matrix, out); });
}

EmbeddingMatrix load_dump_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dump " + path.string());
  try {
    return load_dump(in);
  } catch (const Error& e) {
    throw Error(e.id(), path.string() + ": " + e.what());
  }
}

ScoreMatrix load_score_dump_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dump " + path.string());
  try {
    return load_score_dump(in);
  } catch (const Error& e) {
    throw Error(e.id(), path.string() + ": " + e.what());
  }
}

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix) {
  std::vector<float> out(matrix.data().begin(), matrix.data().end());
  const std::size_t dim = matrix.dim();
  for (std::size_t i = 0; i < matrix.count(); ++i) {
    std::span<float> r(out.data() + i * dim, dim);
    const double norm = row_norm(r);
    if (norm == 0.0) continue;
    for (float& v : r) v = static_cast<float>(v / norm);
  }
  return EmbeddingMatrix(dim, matrix.count(), std::move(out), true);
}

std::filesystem::path sidecar_path(const std::filesystem::path& dump) {
  std::filesystem::path p = dump;
  p += ".jsonl";
  return p;
}

void write_sidecar(const std::filesystem::path& path,
                   std::span<const SidecarEntry> entries) {
  std::ostringstream out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    nlohmann::ordered_json line;
    line["row"] = i;
    line["id"] = entries[i].id;
    if (entries[i].box) {
      const auto& b = *entries[i].box;
      line["box"] = {b[0], b[1], b[2], b[3]};
    }
    out << line.dump() << '\n';
  }
  write_text_atomic(path, out.str());
}

std::vector<SidecarEntry> read_sidecar(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<SidecarEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("row") || !j.contains("id") ||
        !j["row"].is_number_unsigned() || !j["id"].is_string())
      throw FormatError(where + ": expected {\"row\": n, \"id\": \"...\"}");
    if (j["row"].get<std::size_t>() != entries.size())
      throw FormatError(where + ": rows must be listed in order from 0");
    SidecarEntry entry;
    entry.id = j["id"].get<std::string>();
    if (j.contains("box")) {
      const auto& b = j["box"];
      if (!b.is_array() || b.size() != 4)
        throw FormatError(where + ": box must be [x1, y1, x2, y2]");
      entry.box = std::array<double, 4>{b[0].get<double>(), b[1].get<double>(),
                                        b[2].get<double>(), b[3].get<double>()};
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<SidecarEntry> sidecar_from_ids(std::span<const std::string> ids) {
  std::vector<SidecarEntry> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(SidecarEntry{id, std::nullopt});
  return out;
}

}  // namespace osv
