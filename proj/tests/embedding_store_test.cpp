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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "osv/error.hpp"
#include "test_util.hpp"

namespace osv {
namespace {

std::string dump_bytes(const EmbeddingMatrix& m) {
  std::ostringstream out;
  save_dump(m, out);
  return out.str();
}

EmbeddingMatrix from_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  return load_dump(in);
}

TEST(EmbeddingMatrix, RejectsBadShapes) {
  EXPECT_THROW(EmbeddingMatrix(0, 0, {}), ShapeError);
  EXPECT_THROW(EmbeddingMatrix(3, 2, {1, 2, 3}), ShapeError);
  EXPECT_NO_THROW(EmbeddingMatrix(3, 0, {}));
}

TEST(EmbeddingMatrix, NormalizedFlagIsChecked) {
  EXPECT_THROW(EmbeddingMatrix(2, 1, {1.0f, 1.0f}, true), ValidationError);
  // zero rows are allowed in a normalized matrix
  EXPECT_NO_THROW(EmbeddingMatrix(2, 2, {0, 0, 0.6f, 0.8f}, true));
}

TEST(EmbeddingMatrix, SelectPrefixConcat) {
  EmbeddingMatrix m(2, 3, {1, 2, 3, 4, 5, 6});
  const std::size_t rows[] = {2, 0};
  const auto s = m.select_rows(rows);
  EXPECT_EQ(s.count(), 2u);
  EXPECT_EQ(s.row(0)[0], 5.0f);
  EXPECT_EQ(s.row(1)[1], 2.0f);
  EXPECT_EQ(m.prefix(1).count(), 1u);
  const auto c = EmbeddingMatrix::concat(m.prefix(1), s);
  EXPECT_EQ(c.count(), 3u);
  EXPECT_EQ(c.row(2)[0], 1.0f);
}

TEST(Dump, HeaderLayout) {
  // 2 rows of dim 3: 32 header bytes + 24 payload bytes.
  EmbeddingMatrix m(3, 2, {1, 2, 3, 4, 5, 6});
  const auto bytes = dump_bytes(m);
  ASSERT_EQ(bytes.size(), 56u);
  EXPECT_EQ(bytes.substr(0, 4), "OSVD");
  std::uint32_t version, dim;
  std::uint64_t count;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&dim, bytes.data() + 12, 4);
  std::memcpy(&count, bytes.data() + 16, 8);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  EXPECT_EQ(dim, 3u);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(bytes[24], 0);
  float first;
  std::memcpy(&first, bytes.data() + 32, 4);
  EXPECT_EQ(first, 1.0f);
}

TEST(Dump, NormalizedFlagRoundTrips) {
  EmbeddingMatrix m(2, 1, {0.6f, 0.8f}, true);
  const auto bytes = dump_bytes(m);
  EXPECT_EQ(bytes[24], 1);
  EXPECT_TRUE(from_bytes(bytes).normalized());
}

TEST(Dump, RoundTripIsBitExactForEdgeValues) {
  const float denorm = std::numeric_limits<float>::denorm_min();
  const float tiny = std::numeric_limits<float>::min() / 8;
  EmbeddingMatrix m(4, 2,
                    {-0.0f, 0.0f, denorm, -tiny, std::numeric_limits<float>::max(),
                     -1.5f, std::nextafter(1.0f, 2.0f), 1e-30f});
  const auto back = from_bytes(dump_bytes(m));
  EXPECT_TRUE(bit_identical(m, back));
  EXPECT_TRUE(std::signbit(back.row(0)[0]));
}

TEST(Dump, RoundTripProperty) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 1 + trial % 7, count = trial % 5;
    std::vector<float> data(dim * count);
    for (float& x : data) {
      // any finite bit pattern, including subnormals and signed zeros
      do {
        x = std::bit_cast<float>(bits(rng));
      } while (!std::isfinite(x));
    }
    EmbeddingMatrix m(dim, count, data);
    EXPECT_TRUE(bit_identical(m, from_bytes(dump_bytes(m))));
  }
}

TEST(Dump, BadMagicIsFormatError) {
  auto bytes = dump_bytes(EmbeddingMatrix(1, 1, {1}));
  bytes[0] = 'X';
  EXPECT_THROW(from_bytes(bytes), FormatError);
}

TEST(Dump, BadVersionAndDtype) {
  auto bytes = dump_bytes(EmbeddingMatrix(1, 1, {1}));
  auto v = bytes;
  v[4] = 2;
  EXPECT_THROW(from_bytes(v), FormatError);
  auto d = bytes;
  d[8] = 2;
  EXPECT_THROW(from_bytes(d), FormatError);
}

TEST(Dump, ZeroDimIsFormatError) {
  auto bytes = dump_bytes(EmbeddingMatrix(1, 1, {1}));
  std::memset(bytes.data() + 12, 0, 4);
  EXPECT_THROW(from_bytes(bytes), FormatError);
}

TEST(Dump, TruncationIsCorruption) {
  const auto bytes = dump_bytes(EmbeddingMatrix(3, 2, {1, 2, 3, 4, 5, 6}));
  try {
    from_bytes(bytes.substr(0, bytes.size() - 4));
    FAIL() << "expected CorruptionError";
  } catch (const CorruptionError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 24 bytes, got 20"),
              std::string::npos)
        << e.what();
  }
  EXPECT_THROW(from_bytes(bytes.substr(0, 10)), CorruptionError);
}

TEST(Dump, WriteFailureReportsOffset) {
  std::ostringstream sink;
  sink.setstate(std::ios::badbit);
  EXPECT_THROW(save_dump(EmbeddingMatrix(1, 1, {1}), sink), IoError);
}

TEST(Dump, ScoreDumpRejectsNonFinite) {
  ScoreMatrix s{1, 2, {0.5f, std::numeric_limits<float>::quiet_NaN()}};
  std::stringstream io;
  save_dump(s, io);
  EXPECT_THROW(load_score_dump(io), NumericError);
}

TEST(Dump, FileRoundTrip) {
  test::TempDir dir;
  EmbeddingMatrix m(2, 2, {1, 0, 0, 1}, true);
  save_dump_file(dir.path() / "m.osvd", m);
  EXPECT_EQ(load_dump_file(dir.path() / "m.osvd"), m);
  EXPECT_THROW(load_dump_file(dir.path() / "missing.osvd"), IoError);
}

TEST(Normalize, UnitRowsAndZeroRows) {
  EmbeddingMatrix m(2, 2, {3, 4, 0, 0});
  const auto n = l2_normalize(m);
  EXPECT_TRUE(n.normalized());
  EXPECT_FLOAT_EQ(n.row(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(n.row(0)[1], 0.8f);
  EXPECT_EQ(n.row(1)[0], 0.0f);
}

TEST(Normalize, IsIdempotentWithinTolerance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> z;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> data(5 * 8);
    for (float& x : data) x = z(rng) * 10;
    const auto once = l2_normalize(EmbeddingMatrix(8, 5, data));
    const auto twice = l2_normalize(once);
    for (std::size_t i = 0; i < data.size(); ++i)
      EXPECT_NEAR(once.data()[i], twice.data()[i], 1e-6);
  }
}

TEST(Sidecar, RoundTripWithBoxes) {
  test::TempDir dir;
  std::vector<SidecarEntry> entries = {
      {"a", std::nullopt}, {"b", std::array<double, 4>{1, 2, 3.5, 4}}};
  const auto path = sidecar_path(dir.path() / "x.osvd");
  EXPECT_EQ(path.filename(), "x.osvd.jsonl");
  write_sidecar(path, entries);
  const auto back = read_sidecar(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "a");
  EXPECT_FALSE(back[0].box);
  EXPECT_EQ((*back[1].box)[2], 3.5);
}

TEST(Sidecar, OutOfOrderRowsRejected) {
  test::TempDir dir;
  const auto path = dir.path() / "s.jsonl";
  test::write_text(path, "{\"row\":1,\"id\":\"a\"}\n{\"row\":0,\"id\":\"b\"}\n");
  EXPECT_THROW(read_sidecar(path), FormatError);
  test::write_text(path, "not json\n");
  EXPECT_THROW(read_sidecar(path), FormatError);
}

}  // namespace
}  // namespace osv
