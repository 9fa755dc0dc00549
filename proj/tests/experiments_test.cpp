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

#include "osv/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "osv/error.hpp"
#include "osv/io_util.hpp"
#include "osv/kernels.hpp"
#include "osv/synth.hpp"
#include "test_util.hpp"

namespace osv {
namespace {

EmbeddingSource source_of(const SyntheticWorld& w) {
  EmbeddingSource s;
  s.images = w.images;
  s.rows = w.image_rows;
  s.queries = w.queries;
  s.query_labels = w.query_labels;
  if (w.word_negatives.count() > 0) s.word_negatives = w.word_negatives;
  return s;
}

class Quiet : public ::testing::Test {
 protected:
  void SetUp() override { set_warnings_enabled(false); }
  void TearDown() override { set_warnings_enabled(true); }
};

using Experiments = Quiet;

TEST_F(Experiments, SeparableWorldEndToEnd) {
  const auto w = generate_world(WorldSpec::separable_preset(4));
  const auto run = run_eval(w.manifest, build_plan(w.manifest, NegativeSpec{}),
                            source_of(w), EvalConfig{});
  for (const auto& o : run.open) EXPECT_NE(o.outcome, Outcome::kTruePositive);
  EXPECT_EQ(run.report.accuracy, 1.0);
  EXPECT_EQ(run.report.tp_count, 320u);
  EXPECT_EQ(run.report.ose_count, 480u);
  EXPECT_EQ(run.report.measure("cosine")->aupr, 1.0);
  EXPECT_EQ(run.report.measures.size(), 3u);
  EXPECT_EQ(run.report.metadata["mode"], "embedding");
}

TEST_F(Experiments, SigmoidHeadMatchesCosineRanking) {
  const auto w = generate_world(WorldSpec::overlap_preset(2));
  EvalConfig cfg;
  cfg.head = Head::kSigmoid;
  const auto r = full_eval(w.manifest, source_of(w), NegativeSpec{}, cfg);
  ASSERT_EQ(measure_names(Head::kSigmoid), (std::vector<std::string>{"cosine", "sigmoid"}));
  const auto* cos = r.measure("cosine");
  const auto* sig = r.measure("sigmoid");
  ASSERT_TRUE(cos && sig);
  EXPECT_NEAR(*cos->aupr, *sig->aupr, 1e-12);
  EXPECT_NEAR(*cos->auroc, *sig->auroc, 1e-12);
}

TEST_F(Experiments, ZeroNegativeLeavesClosedTpUnchanged) {
  const auto w = generate_world(WorldSpec::separable_preset(6));
  const auto none = full_eval(w.manifest, source_of(w), NegativeSpec{}, EvalConfig{});
  const auto zero = full_eval(w.manifest, source_of(w),
                              make_negative_spec(NegativeKind::kZeroEmbedding, 1, 0),
                              EvalConfig{});
  EXPECT_EQ(none.tp_count, zero.tp_count);
  EXPECT_EQ(zero.negative_capture.size(), 1u);
}

TEST_F(Experiments, MissingEmbeddingsAreCoverageErrors) {
  const auto w = generate_world(WorldSpec::separable_preset(1));
  auto src = source_of(w);
  src.images = src.images.prefix(src.images.count() - 1);
  src.rows.pop_back();
  EXPECT_THROW(full_eval(w.manifest, src, NegativeSpec{}, EvalConfig{}), CoverageError);
  auto no_query = source_of(w);
  no_query.query_labels[0] = "renamed";
  EXPECT_THROW(full_eval(w.manifest, no_query, NegativeSpec{}, EvalConfig{}),
               CoverageError);
  EXPECT_THROW(full_eval(w.manifest, source_of(w),
                         make_negative_spec(NegativeKind::kRandomWords, 3, 0),
                         EvalConfig{}),
               CoverageError);
}

TEST_F(Experiments, ScoreModeAgreesWithEmbeddingMode) {
  test::TempDir dir;
  const auto w = generate_world(WorldSpec::separable_preset(9));
  const auto plan = build_plan(w.manifest, NegativeSpec{});
  const auto src = source_of(w);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < src.rows.size(); ++i) row_of[src.rows[i].id] = i;
  auto write = [&](Pass pass, const std::string& id,
                   const std::vector<std::string>& labels) {
    std::vector<std::size_t> cols;
    for (const auto& l : labels)
      cols.push_back(std::find(w.query_labels.begin(), w.query_labels.end(), l) -
                     w.query_labels.begin());
    const auto row = cosine_scores(src.images.row(row_of.at(id)), src.queries);
    ScoredRegions regions;
    regions.scores.rows = 1;
    regions.scores.cols = cols.size();
    for (auto c : cols) regions.scores.data.push_back(static_cast<float>(row.scores[c]));
    regions.boxes = {std::nullopt};
    save_scored_regions(dir.path(), pass, id, regions);
  };
  for (const auto& id : plan.closed_images) write(Pass::kClosed, id, plan.closed_query);
  for (const auto& img : plan.open_images) write(Pass::kOpen, img.image_id, img.open_query);

  const auto scored = run_eval(w.manifest, plan, load_score_source(dir.path(), plan),
                               EvalConfig{});
  const auto embedded = run_eval(w.manifest, plan, src, EvalConfig{});
  EXPECT_EQ(scored.report.tp_count, embedded.report.tp_count);
  EXPECT_EQ(scored.report.ose_count, embedded.report.ose_count);
  EXPECT_EQ(scored.report.accuracy, embedded.report.accuracy);
  EXPECT_EQ(scored.report.metadata["mode"], "score");
  for (std::size_t i = 0; i < scored.closed.size(); ++i)
    EXPECT_NEAR(scored.closed[i].prediction.psi.cosine,
                embedded.closed[i].prediction.psi.cosine, 1e-6);

  std::filesystem::remove(dir.path() / "open" / (plan.open_images[0].image_id + ".osvd"));
  EXPECT_THROW(load_score_source(dir.path(), plan), CoverageError);
}

TEST_F(Experiments, ScoreModeNativeNegativeSlots) {
  DatasetManifest m;
  m.classes = {"a", "b"};
  m.images = {ImageEntry{"x", {"a"}, {}, {}}};
  const auto plan = build_plan(m, NegativeSpec{});
  ScoreSource src;
  src.closed["x"].scores = ScoreMatrix{1, 3, {0.9f, 0.1f, 0.2f}};
  src.open["x"].scores = ScoreMatrix{1, 2, {0.1f, 0.7f}};
  const auto run = run_eval(m, plan, src, EvalConfig{});
  EXPECT_EQ(run.closed[0].outcome, Outcome::kTruePositive);
  EXPECT_EQ(run.open[0].outcome, Outcome::kRejected);
  ASSERT_EQ(run.report.negative_capture.size(), 1u);
  EXPECT_EQ(run.report.negative_capture[0], (CaptureStats{0, 1}));
  src.open["x"].scores = ScoreMatrix{1, 3, {0.1f, 0.7f, 0.0f}};
  EXPECT_THROW(run_eval(m, plan, src, EvalConfig{}), ConsistencyError);
}

TEST_F(Experiments, DetectionWorld) {
  const auto w = generate_world(WorldSpec::detection_preset(3));
  const auto run = run_eval(w.manifest, build_plan(w.manifest, NegativeSpec{}),
                            source_of(w), EvalConfig{});
  ASSERT_TRUE(run.report.map);
  EXPECT_GT(*run.report.map, 0.9);
  EXPECT_FALSE(run.report.accuracy);
  EXPECT_EQ(run.report.per_class_ap.size(), w.manifest.classes.size());
  for (const auto& o : run.open) EXPECT_NE(o.outcome, Outcome::kTruePositive);
}

TEST_F(Experiments, QuerySizeSweepShape) {
  const auto w = generate_world(WorldSpec::overlap_preset(1));
  const std::size_t sizes[] = {4, 16};
  const std::uint64_t seeds[] = {1, 2, 3};
  const auto out = sweep_query_size(w.manifest, source_of(w), sizes, seeds,
                                    NegativeSpec{}, EvalConfig{});
  ASSERT_EQ(out.results.size(), 2u);
  EXPECT_EQ(out.results[0].per_seed.size(), 3u);
  EXPECT_TRUE(out.results[0].stddev.count("accuracy"));
  EXPECT_EQ(out.reports[1][0].closed_images, 16u * 20u);
  const auto csv = sweep_csv(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "axis,seed,metric,value");
  const std::size_t dup[] = {4, 4};
  EXPECT_THROW(sweep_query_size(w.manifest, source_of(w), dup, seeds,
                                NegativeSpec{}, EvalConfig{}),
               ParameterError);
}

TEST_F(Experiments, ClassSubsetSampling) {
  const auto a = sample_class_subset(64, 16, 5);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, sample_class_subset(64, 16, 5));
  EXPECT_NE(a, sample_class_subset(64, 16, 6));
  EXPECT_THROW(sample_class_subset(4, 5, 0), ParameterError);
}

TEST_F(Experiments, NegativeSweep) {
  const auto w = generate_world(WorldSpec::separable_preset(2));
  const std::size_t counts[] = {0, 5, 100};
  const std::uint64_t seeds[] = {7};
  const auto out = sweep_negatives(w.manifest, source_of(w),
                                   NegativeKind::kRandomEmbeddings, counts, seeds,
                                   EvalConfig{});
  ASSERT_EQ(out.reports.size(), 3u);
  EXPECT_TRUE(out.reports[0][0].negative_capture.empty());
  EXPECT_EQ(out.reports[2][0].negative_capture.size(), 100u);
  EXPECT_TRUE(out.results[0].stddev.empty());
  EXPECT_THROW(sweep_negatives(w.manifest, source_of(w), NegativeKind::kRandomWords,
                               counts, seeds, EvalConfig{}),
               CoverageError);
  EXPECT_THROW(sweep_negatives(w.manifest, source_of(w), NegativeKind::kZeroEmbedding,
                               counts, seeds, EvalConfig{}),
               ParameterError);
}

TEST_F(Experiments, GridIndependentOfWorkerCount) {
  const auto w = generate_world(WorldSpec::overlap_preset(3));
  const std::size_t sizes[] = {4, 8};
  const std::uint64_t seeds[] = {1, 2};
  kernels::set_worker_count(1);
  const auto one = to_json(sweep_query_size(w.manifest, source_of(w), sizes, seeds,
                                            NegativeSpec{}, EvalConfig{}))
                       .dump();
  kernels::set_worker_count(4);
  const auto four = to_json(sweep_query_size(w.manifest, source_of(w), sizes, seeds,
                                             NegativeSpec{}, EvalConfig{}))
                        .dump();
  kernels::set_worker_count(0);
  EXPECT_EQ(one, four);
}

}  // namespace
}  // namespace osv
