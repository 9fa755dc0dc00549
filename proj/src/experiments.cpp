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

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "osv/error.hpp"
#include "osv/io_util.hpp"
#include "osv/kernels.hpp"

namespace osv {
namespace {

using nlohmann::ordered_json;

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > shown)
    out += " ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

void check_image_id_is_filename(const std::string& id) {
  if (id.empty() || id.find('/') != std::string::npos || id.front() == '.')
    throw ValidationError("image id '" + id + "' cannot be used as a file name");
}

std::optional<Box> to_box(const std::optional<std::array<double, 4>>& b) {
  if (!b) return std::nullopt;
  return Box{(*b)[0], (*b)[1], (*b)[2], (*b)[3]};
}

// Image id -> dump rows, in dump order.
std::unordered_map<std::string, std::vector<std::size_t>> rows_by_image(
    const EmbeddingSource& source) {
  std::unordered_map<std::string, std::vector<std::size_t>> out;
  for (std::size_t r = 0; r < source.rows.size(); ++r)
    out[source.rows[r].id].push_back(r);
  return out;
}

double value_of(const UncertaintyTriple& psi, std::string_view measure) {
  if (measure == "cosine") return psi.cosine;
  if (measure == "entropy") return psi.entropy_neg;
  return psi.softmax;
}

ordered_json base_metadata(const PlanFile& plan, const EvalConfig& config,
                           std::string_view mode) {
  ordered_json meta;
  meta["mode"] = std::string(mode);
  meta["dataset_id"] = plan.dataset_id;
  meta["head"] = std::string(to_string(config.head));
  meta["temperature"] = round_sig9(config.temperature);
  meta["negatives"] = to_json(plan.negatives);
  meta["plan_seed"] = plan.seed;
  meta["psi"] =
      "max over query slots; negative slots join the softmax normalization";
  meta["entropy_log_base"] = "e";
  meta["aupr_rule"] =
      "trapezoidal over recall, anchored at recall 0 with the first "
      "point's precision";
  meta["operating_points"] = "best value over qualifying curve points";
  meta["iou_threshold"] = round_sig9(config.iou_threshold);
  meta["ap_rule"] = "101-point interpolated (COCO)";
  meta["histogram_bins"] = config.histogram_bins;
  meta["run_config"] = config.run_config;
  return meta;
}

EvalRun finish_run(const DatasetManifest& manifest, const PlanFile& plan,
                   std::vector<ImagePrediction> closed_preds,
                   std::vector<ImagePrediction> open_preds,
                   std::size_t negative_count, const EvalConfig& config,
                   ordered_json metadata) {
  EvalRun run;
  if (manifest.task == Task::kClassification) {
    run.closed = label_classification(closed_preds, manifest, Pass::kClosed);
    run.open = label_classification(open_preds, manifest, Pass::kOpen);
  } else {
    run.closed = label_detection(closed_preds, manifest, plan, Pass::kClosed,
                                 config.iou_threshold);
    run.open = label_detection(open_preds, manifest, plan, Pass::kOpen,
                               config.iou_threshold);
  }

  EvalReport& r = run.report;
  r.task = manifest.task;
  r.closed_images = plan.closed_images.size();
  r.open_images = plan.open_images.size();
  r.closed_predictions = run.closed.size();
  r.open_predictions = run.open.size();
  for (const auto& o : run.closed) {
    if (o.outcome == Outcome::kTruePositive) ++r.tp_count;
    if (o.outcome == Outcome::kRejected) ++r.closed_rejected;
  }
  for (const auto& o : run.open) {
    if (o.outcome == Outcome::kOpenSetError) ++r.ose_count;
    if (o.outcome == Outcome::kRejected) ++r.open_rejected;
  }

  if (manifest.task == Task::kClassification) {
    if (!run.closed.empty()) r.accuracy = top1_accuracy(run.closed);
  } else {
    const auto map = detection_map(run.closed, manifest);
    if (map.classes_with_gt > 0) r.map = map.map;
    r.classes = manifest.classes;
    r.per_class_ap = map.per_class_ap;
  }

  for (const auto& name : measure_names(config.head)) {
    std::vector<double> tp_psi, ose_psi;
    for (const auto& o : run.closed)
      if (o.outcome == Outcome::kTruePositive)
        tp_psi.push_back(value_of(o.prediction.psi, name));
    for (const auto& o : run.open)
      if (o.outcome == Outcome::kOpenSetError)
        ose_psi.push_back(value_of(o.prediction.psi, name));
    r.measures.push_back(
        evaluate_measure(name, tp_psi, ose_psi, config.histogram_bins));
  }
  if (negative_count > 0)
    r.negative_capture =
        negative_capture_stats(run.closed, run.open, negative_count);
  r.metadata = std::move(metadata);
  return run;
}

struct PlannedPass {
  std::vector<kernels::ClassifyJob> jobs;
  std::vector<std::string> image_ids;
  std::vector<std::optional<Box>> boxes;
  std::vector<const std::vector<std::string>*> labels;
};

}  // namespace

EmbeddingSource load_embedding_source(
    const std::filesystem::path& images, const std::filesystem::path& queries,
    const std::optional<std::filesystem::path>& word_negatives) {
  EmbeddingSource source;
  source.images = load_dump_file(images);
  source.rows = read_sidecar(sidecar_path(images));
  if (source.rows.size() != source.images.count())
    throw ConsistencyError(images.string() + ": sidecar lists " +
                           std::to_string(source.rows.size()) + " rows, dump has " +
                           std::to_string(source.images.count()));
  auto q = load_dump_file(queries);
  if (!q.normalized()) {
    log_warning(queries.string() + " is not flagged normalized; normalizing");
    q = l2_normalize(q);
  }
  source.queries = std::move(q);
  for (auto& e : read_sidecar(sidecar_path(queries)))
    source.query_labels.push_back(std::move(e.id));
  if (source.query_labels.size() != source.queries.count())
    throw ConsistencyError(queries.string() +
                           ": sidecar and dump row counts differ");
  if (source.images.dim() != source.queries.dim())
    throw ShapeError("image and query embeddings differ in dim");
  if (word_negatives) source.word_negatives = load_dump_file(*word_negatives);
  return source;
}

ScoreSource load_score_source(const std::filesystem::path& dir,
                              const PlanFile& plan) {
  ScoreSource source;
  std::vector<std::string> missing;
  auto load_one = [&](Pass pass, const std::string& image_id,
                      std::map<std::string, ScoredRegions>& into) {
    check_image_id_is_filename(image_id);
    const auto path =
        dir / std::string(to_string(pass)) / (image_id + ".osvd");
    if (!std::filesystem::exists(path)) {
      missing.push_back(std::string(to_string(pass)) + "/" + image_id);
      return;
    }
    ScoredRegions regions;
    regions.scores = load_score_dump_file(path);
    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
      for (const auto& e : read_sidecar(side)) regions.boxes.push_back(to_box(e.box));
      if (regions.boxes.size() != regions.scores.rows)
        throw ConsistencyError(side.string() + ": row count mismatch");
    } else {
      regions.boxes.assign(regions.scores.rows, std::nullopt);
    }
    into.emplace(image_id, std::move(regions));
  };
  for (const auto& id : plan.closed_images) load_one(Pass::kClosed, id, source.closed);
  for (const auto& img : plan.open_images)
    load_one(Pass::kOpen, img.image_id, source.open);
  if (!missing.empty())
    throw CoverageError("missing score dumps: " + join_ids(missing));
  return source;
}

void save_scored_regions(const std::filesystem::path& dir, Pass pass,
                         const std::string& image_id,
                         const ScoredRegions& regions) {
  check_image_id_is_filename(image_id);
  const auto path = dir / std::string(to_string(pass)) / (image_id + ".osvd");
  save_dump_file(path, regions.scores);
  std::vector<SidecarEntry> side;
  for (std::size_t r = 0; r < regions.scores.rows; ++r) {
    SidecarEntry e{image_id + "#" + std::to_string(r), std::nullopt};
    if (r < regions.boxes.size() && regions.boxes[r]) {
      const auto& b = *regions.boxes[r];
      e.box = std::array<double, 4>{b.x1, b.y1, b.x2, b.y2};
    }
    side.push_back(std::move(e));
  }
  write_sidecar(sidecar_path(path), side);
}

std::vector<std::string> measure_names(Head head) {
  if (head == Head::kSoftmax) return {"cosine", "softmax", "entropy"};
  return {"cosine", "sigmoid"};
}

EvalRun run_eval(const DatasetManifest& manifest, const PlanFile& plan,
                 const EmbeddingSource& source, const EvalConfig& config) {
  check_plan_matches(plan, manifest);

  // Query rows in class order.
  std::unordered_map<std::string_view, std::size_t> query_row;
  for (std::size_t i = 0; i < source.query_labels.size(); ++i)
    query_row.emplace(source.query_labels[i], i);
  std::vector<std::size_t> class_rows;
  std::vector<std::string> missing_labels;
  for (const auto& c : manifest.classes) {
    auto it = query_row.find(c);
    if (it == query_row.end())
      missing_labels.push_back(c);
    else
      class_rows.push_back(it->second);
  }
  if (!missing_labels.empty())
    throw CoverageError("query dump lacks labels: " + join_ids(missing_labels));
  const EmbeddingMatrix queries = source.queries.select_rows(class_rows);
  const EmbeddingMatrix negatives =
      materialize_negatives(plan.negatives, queries, source.word_negatives);
  const std::size_t k = queries.count();
  const std::size_t m = negatives.count();

  // Only rows of planned images are scored.
  const auto by_image = rows_by_image(source);
  std::vector<std::string> missing_images;
  std::vector<std::size_t> used_rows;
  std::unordered_map<std::string_view, std::pair<std::size_t, std::size_t>>
      span_of;  // image -> [first, last) in used_rows
  std::vector<std::string_view> scored_ids(plan.closed_images.begin(),
                                          plan.closed_images.end());
  {
    const std::unordered_set<std::string_view> in_closed(scored_ids.begin(),
                                                         scored_ids.end());
    for (const auto& img : plan.open_images)
      if (!in_closed.count(img.image_id)) scored_ids.push_back(img.image_id);
  }
  for (const auto id_view : scored_ids) {
    const std::string id(id_view);
    auto it = by_image.find(id);
    if (it == by_image.end()) {
      missing_images.push_back(id);
      continue;
    }
    if (manifest.task == Task::kClassification && it->second.size() != 1)
      throw ConsistencyError("image '" + id + "' has " +
                             std::to_string(it->second.size()) +
                             " embedding rows; classification needs one");
    const std::size_t first = used_rows.size();
    used_rows.insert(used_rows.end(), it->second.begin(), it->second.end());
    span_of.emplace(id_view, std::make_pair(first, used_rows.size()));
  }
  if (!missing_images.empty())
    throw CoverageError("no embeddings for images: " + join_ids(missing_images));

  const EmbeddingMatrix images = source.images.select_rows(used_rows);
  const auto scores = kernels::cosine_matrix_omp(
      images, EmbeddingMatrix::concat(queries, negatives));

  std::vector<std::size_t> closed_cols(k);
  std::iota(closed_cols.begin(), closed_cols.end(), 0);
  std::vector<std::size_t> negative_cols(m);
  std::iota(negative_cols.begin(), negative_cols.end(), k);

  std::unordered_map<std::string_view, std::size_t> class_col;
  for (std::size_t c = 0; c < k; ++c) class_col.emplace(manifest.classes[c], c);
  std::vector<std::vector<std::size_t>> open_cols(plan.open_images.size());
  for (std::size_t i = 0; i < plan.open_images.size(); ++i)
    for (const auto& label : plan.open_images[i].open_query)
      open_cols[i].push_back(class_col.at(label));

  auto add_jobs = [&](PlannedPass& pass, const std::string& id,
                      std::span<const std::size_t> cols,
                      const std::vector<std::string>* labels) {
    const auto [first, last] = span_of.at(id);
    for (std::size_t r = first; r < last; ++r) {
      pass.jobs.push_back(kernels::ClassifyJob{r, cols, negative_cols});
      pass.image_ids.push_back(id);
      pass.boxes.push_back(to_box(source.rows[used_rows[r]].box));
      pass.labels.push_back(labels);
    }
  };
  PlannedPass closed, open;
  for (const auto& id : plan.closed_images)
    add_jobs(closed, id, closed_cols, &manifest.classes);
  for (std::size_t i = 0; i < plan.open_images.size(); ++i) {
    const auto& img = plan.open_images[i];
    if (!span_of.count(img.image_id))
      throw CoverageError("no embeddings for open-pass image " + img.image_id);
    add_jobs(open, img.image_id, open_cols[i], &img.open_query);
  }

  auto predict = [&](const PlannedPass& pass) {
    const auto decisions = kernels::classify_batch_omp(
        scores, pass.jobs, config.temperature, config.head);
    std::vector<ImagePrediction> preds;
    preds.reserve(decisions.size());
    for (std::size_t i = 0; i < decisions.size(); ++i)
      preds.push_back(make_prediction(pass.image_ids[i], decisions[i],
                                      *pass.labels[i], pass.boxes[i]));
    return preds;
  };

  auto meta = base_metadata(plan, config, "embedding");
  meta["negative_slots"] = m;
  return finish_run(manifest, plan, predict(closed), predict(open), m, config,
                    std::move(meta));
}

EvalRun run_eval(const DatasetManifest& manifest, const PlanFile& plan,
                 const ScoreSource& source, const EvalConfig& config) {
  check_plan_matches(plan, manifest);
  std::optional<std::size_t> negative_count;
  std::vector<std::string> missing;

  auto predict = [&](const std::string& image_id,
                     const std::vector<std::string>& labels,
                     const std::map<std::string, ScoredRegions>& table,
                     Pass pass) {
    std::vector<ImagePrediction> preds;
    auto it = table.find(image_id);
    if (it == table.end()) {
      missing.push_back(std::string(to_string(pass)) + "/" + image_id);
      return preds;
    }
    const auto& regions = it->second;
    if (regions.scores.cols < labels.size())
      throw ConsistencyError("score dump for '" + image_id + "' (" +
                             std::string(to_string(pass)) + ") has " +
                             std::to_string(regions.scores.cols) +
                             " columns for " + std::to_string(labels.size()) +
                             " query labels");
    const std::size_t m = regions.scores.cols - labels.size();
    if (regions.scores.rows > 0) {
      if (negative_count && *negative_count != m)
        throw ConsistencyError("score dumps disagree on negative slot count");
      negative_count = m;
    }
    if (manifest.task == Task::kClassification && regions.scores.rows != 1)
      throw ConsistencyError("classification score dump for '" + image_id +
                             "' must have exactly one row");
    for (std::size_t r = 0; r < regions.scores.rows; ++r) {
      const auto decision = classify(make_row(regions.scores.row(r), labels.size()),
                                     config.temperature, config.head);
      preds.push_back(make_prediction(image_id, decision, labels,
                                      r < regions.boxes.size() ? regions.boxes[r]
                                                               : std::nullopt));
    }
    return preds;
  };

  std::vector<ImagePrediction> closed, open;
  for (const auto& id : plan.closed_images) {
    auto p = predict(id, plan.closed_query, source.closed, Pass::kClosed);
    closed.insert(closed.end(), p.begin(), p.end());
  }
  for (const auto& img : plan.open_images) {
    auto p = predict(img.image_id, img.open_query, source.open, Pass::kOpen);
    open.insert(open.end(), p.begin(), p.end());
  }
  if (!missing.empty())
    throw CoverageError("missing score dumps: " + join_ids(missing));

  auto meta = base_metadata(plan, config, "score");
  meta["negative_slots"] = negative_count.value_or(0);
  meta["cosine_measure"] = "max raw model score over query slots";
  return finish_run(manifest, plan, std::move(closed), std::move(open),
                    negative_count.value_or(0), config, std::move(meta));
}

EvalReport full_eval(const DatasetManifest& manifest,
                     const EmbeddingSource& source,
                     const NegativeSpec& negatives, const EvalConfig& config) {
  const PlanFile plan = build_plan(manifest, negatives, negatives.seed);
  return run_eval(manifest, plan, source, config).report;
}

std::map<std::string, std::optional<double>> summarize(
    const EvalReport& report) {
  std::map<std::string, std::optional<double>> out;
  if (report.task == Task::kClassification)
    out["accuracy"] = report.accuracy;
  else
    out["map"] = report.map;
  out["tp_count"] = static_cast<double>(report.tp_count);
  out["ose_count"] = static_cast<double>(report.ose_count);
  out["closed_rejected"] = static_cast<double>(report.closed_rejected);
  out["open_rejected"] = static_cast<double>(report.open_rejected);
  for (const auto& m : report.measures) {
    out["aupr." + m.name] = m.aupr;
    out["auroc." + m.name] = m.auroc;
    out["p_at_95r." + m.name] = m.p_at_95r;
    out["r_at_95p." + m.name] = m.r_at_95p;
  }
  return out;
}

namespace {

void check_axis(std::span<const std::size_t> values, const char* what) {
  if (values.empty())
    throw ParameterError(std::string("no ") + what + " given");
  std::set<std::size_t> seen;
  for (std::size_t v : values)
    if (!seen.insert(v).second)
      throw ParameterError(std::string("repeated ") + what + " value " +
                           std::to_string(v));
}

SweepResult aggregate(std::string axis, std::size_t value,
                      std::span<const std::uint64_t> seeds,
                      const std::vector<EvalReport>& reports) {
  SweepResult result;
  result.axis = std::move(axis);
  result.axis_value = value;
  for (std::size_t s = 0; s < reports.size(); ++s)
    result.per_seed.push_back(SeedSummary{seeds[s], summarize(reports[s])});
  std::set<std::string> keys;
  for (const auto& s : result.per_seed)
    for (const auto& [k, v] : s.metrics) keys.insert(k);
  const bool spread = result.per_seed.size() >= 2;
  for (const auto& key : keys) {
    std::vector<double> xs;
    for (const auto& s : result.per_seed) {
      auto it = s.metrics.find(key);
      if (it != s.metrics.end() && it->second) xs.push_back(*it->second);
    }
    if (xs.empty()) {
      result.mean[key] = std::nullopt;
      if (spread) result.stddev[key] = std::nullopt;
      continue;
    }
    const double mean =
        std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    result.mean[key] = mean;
    if (!spread) continue;
    if (xs.size() >= 2) {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      result.stddev[key] = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    } else {
      result.stddev[key] = std::nullopt;
    }
  }
  return result;
}

// Runs job(point, seed) for every grid cell, in parallel, merged in order.
template <typename Job>
std::vector<std::vector<EvalReport>> run_grid(std::size_t points,
                                              std::size_t seeds, Job job) {
  std::vector<std::vector<EvalReport>> reports(points,
                                               std::vector<EvalReport>(seeds));
  std::exception_ptr failure;
  const auto cells = static_cast<std::ptrdiff_t>(points * seeds);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::worker_count())
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const auto p = static_cast<std::size_t>(c) / seeds;
    const auto s = static_cast<std::size_t>(c) % seeds;
    try {
      reports[p][s] = job(p, s);
    } catch (...) {
#pragma omp critical(osv_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reports;
}

}  // namespace

SweepOutput sweep_negatives(const DatasetManifest& manifest,
                            const EmbeddingSource& source, NegativeKind kind,
                            std::span<const std::size_t> counts,
                            std::span<const std::uint64_t> seeds,
                            const EvalConfig& config) {
  check_axis(counts, "negative count");
  if (seeds.empty()) throw ParameterError("need at least one seed");
  if (kind != NegativeKind::kRandomWords &&
      kind != NegativeKind::kRandomEmbeddings)
    throw ParameterError("negative sweeps take random-words or random-embeddings");
  const std::size_t most = *std::max_element(counts.begin(), counts.end());
  if (kind == NegativeKind::kRandomWords) {
    const std::size_t have =
        source.word_negatives ? source.word_negatives->count() : 0;
    if (most > have)
      throw CoverageError("requested " + std::to_string(most) +
                          " random words but only " + std::to_string(have) +
                          " are encoded");
  }

  SweepOutput out;
  out.reports = run_grid(counts.size(), seeds.size(), [&](std::size_t p,
                                                          std::size_t s) {
    const NegativeSpec spec =
        counts[p] == 0 ? NegativeSpec{}
                       : make_negative_spec(kind, counts[p], seeds[s]);
    EvalConfig cfg = config;
    cfg.run_config["sweep"] = {{"axis", "negative_count"},
                               {"value", counts[p]},
                               {"seed", seeds[s]}};
    return full_eval(manifest, source, spec, cfg);
  });
  for (std::size_t p = 0; p < counts.size(); ++p)
    out.results.push_back(
        aggregate("negative_count", counts[p], seeds, out.reports[p]));
  return out;
}

std::vector<std::size_t> sample_class_subset(std::size_t class_count,
                                             std::size_t size,
                                             std::uint64_t seed) {
  if (size == 0 || size > class_count)
    throw ParameterError("query size " + std::to_string(size) +
                         " outside [1, " + std::to_string(class_count) + "]");
  std::vector<std::size_t> all(class_count);
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

SweepOutput sweep_query_size(const DatasetManifest& manifest,
                             const EmbeddingSource& source,
                             std::span<const std::size_t> sizes,
                             std::span<const std::uint64_t> seeds,
                             const NegativeSpec& negatives,
                             const EvalConfig& config) {
  check_axis(sizes, "query size");
  if (seeds.empty()) throw ParameterError("need at least one seed");
  if (manifest.task != Task::kClassification)
    throw ParameterError("query-size sweeps need a classification manifest");
  const std::size_t k = manifest.classes.size();
  for (std::size_t size : sizes)
    if (size == 0 || size > k)
      throw ParameterError("query size " + std::to_string(size) +
                           " outside [1, " + std::to_string(k) + "]");

  SweepOutput out;
  out.reports = run_grid(sizes.size(), seeds.size(), [&](std::size_t p,
                                                         std::size_t s) {
    const auto subset = sample_class_subset(k, sizes[p], seeds[s]);
    DatasetManifest sub;
    sub.task = manifest.task;
    sub.dataset_id = manifest.dataset_id;
    for (std::size_t c : subset) sub.classes.push_back(manifest.classes[c]);
    const std::unordered_set<std::string_view> keep(sub.classes.begin(),
                                                    sub.classes.end());
    for (const auto& image : manifest.images)
      if (keep.count(image.gt_labels.front())) sub.images.push_back(image);

    EvalConfig cfg = config;
    cfg.run_config["sweep"] = {{"axis", "query_size"},
                               {"value", sizes[p]},
                               {"seed", seeds[s]}};
    return full_eval(sub, source, negatives, cfg);
  });
  for (std::size_t p = 0; p < sizes.size(); ++p)
    out.results.push_back(
        aggregate("query_size", sizes[p], seeds, out.reports[p]));
  return out;
}

ordered_json to_json(const SweepOutput& sweep) {
  auto metric_map = [](const std::map<std::string, std::optional<double>>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m)
      j[k] = v ? ordered_json(round_sig9(*v)) : ordered_json(nullptr);
    return j;
  };
  ordered_json arr = ordered_json::array();
  for (const auto& r : sweep.results) {
    ordered_json e;
    e["axis"] = r.axis;
    e["value"] = r.axis_value;
    ordered_json seeds = ordered_json::array();
    for (const auto& s : r.per_seed)
      seeds.push_back({{"seed", s.seed}, {"metrics", metric_map(s.metrics)}});
    e["per_seed"] = std::move(seeds);
    e["mean"] = metric_map(r.mean);
    if (r.per_seed.size() >= 2) e["std"] = metric_map(r.stddev);
    arr.push_back(std::move(e));
  }
  return arr;
}

std::string sweep_csv(const SweepOutput& sweep) {
  std::ostringstream out;
  out << "axis,seed,metric,value\n";
  for (const auto& r : sweep.results)
    for (const auto& s : r.per_seed)
      for (const auto& [k, v] : s.metrics)
        out << r.axis_value << ',' << s.seed << ',' << k << ','
            << (v ? format_sig9(*v) : std::string("-")) << '\n';
  return out.str();
}

}  // namespace osv
