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

#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "osv/error.hpp"
#include "osv/experiments.hpp"
#include "osv/io_util.hpp"
#include "osv/kernels.hpp"
#include "osv/negatives.hpp"
#include "osv/protocol.hpp"
#include "osv/report.hpp"
#include "osv/seeds.hpp"
#include "osv/synth.hpp"

namespace osv::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

struct Options {
  int workers = 0;
  bool quiet = false;

  // plan / score / sweep
  std::string manifest;
  std::string plan;
  std::string out;
  std::string negatives = "none";
  std::size_t negative_count = 0;
  std::uint64_t seed = 0;
  std::string words_out;

  std::string images;
  std::string queries;
  std::string negative_dump;
  std::string score_dir;
  std::string head = "softmax";
  double temperature = kDefaultTemperature;
  std::size_t hist_bins = 20;
  double iou = kDefaultIouThreshold;

  std::vector<std::size_t> query_sizes;
  std::vector<std::size_t> counts;
  std::size_t seeds = 0;

  // synth
  std::string preset = "separable";
  std::optional<std::size_t> classes;
  std::optional<std::size_t> open_classes;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> images_per_class;
  std::optional<double> noise;
  std::optional<double> margin;
  std::size_t words = 0;

  // report
  std::string in;
};

// Every option the user set on a subcommand, as given on the command line.
ordered_json run_config(const CLI::App& sub) {
  ordered_json j;
  j["command"] = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const auto& results = opt->results();
    if (results.size() == 1)
      j[key] = results.front();
    else
      j[key] = results;
  }
  return j;
}

// Appends "--key value" for every key of a JSON config file that was not
// given explicitly, so command-line flags win over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw ParameterError("--config needs a file");
  const fs::path path = *(it + 1);
  args.erase(it, it + 2);
  json config;
  try {
    config = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!config.is_object())
    throw FormatError(path.string() + ": config must be a JSON object");
  const std::set<std::string> given(args.begin(), args.end());
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (given.count(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (value.is_string()) {
      args.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(joined);
    } else {
      args.push_back(value.dump());
    }
  }
  return args;
}

EvalConfig eval_config(const Options& o, const CLI::App& sub) {
  EvalConfig config;
  config.head = head_from_string(o.head);
  config.temperature = o.temperature;
  config.histogram_bins = o.hist_bins;
  config.iou_threshold = o.iou;
  config.run_config = run_config(sub);
  return config;
}

NegativeSpec negative_spec(const Options& o) {
  const auto kind = negative_kind_from_string(o.negatives);
  std::size_t count = o.negative_count;
  if (kind != NegativeKind::kNone && count == 0 &&
      (kind == NegativeKind::kRandomWords ||
       kind == NegativeKind::kRandomEmbeddings))
    throw ParameterError("--negative-count is required for " + o.negatives);
  return make_negative_spec(kind, count, derive_seed(o.seed, "negatives"));
}

std::optional<fs::path> optional_path(const std::string& p) {
  if (p.empty()) return std::nullopt;
  return fs::path(p);
}

int cmd_plan(const Options& o, std::ostream& out) {
  const auto manifest = load_manifest(o.manifest);
  const auto spec = negative_spec(o);
  const auto plan = build_plan(manifest, spec, o.seed);
  save_plan(o.out, plan);
  if (!o.words_out.empty()) {
    std::vector<std::string> words;
    if (spec.kind == NegativeKind::kRandomWords)
      words = random_words(spec.count, spec.seed);
    else if (spec.kind == NegativeKind::kSimpleWord)
      words = {simple_word()};
    else
      throw ParameterError("--words-out needs word-based negatives");
    write_text_atomic(o.words_out, ordered_json(words).dump(2) + "\n");
  }
  out << "plan: " << plan.closed_images.size() << " closed-pass images, "
      << plan.open_images.size() << " open-pass images";
  if (!plan.excluded_from_open.empty())
    out << " (" << plan.excluded_from_open.size() << " excluded from open)";
  out << " -> " << o.out << '\n';
  return kExitOk;
}

int cmd_score(const Options& o, const CLI::App& sub, std::ostream& out) {
  const auto manifest = load_manifest(o.manifest);
  const auto plan = load_plan(o.plan);
  const auto config = eval_config(o, sub);
  EvalRun run;
  if (!o.score_dir.empty()) {
    if (!o.images.empty() || !o.queries.empty())
      throw ParameterError("use either --score-dir or --images/--queries");
    run = run_eval(manifest, plan, load_score_source(o.score_dir, plan), config);
  } else {
    if (o.images.empty() || o.queries.empty())
      throw ParameterError("embedding mode needs --images and --queries");
    const auto source = load_embedding_source(o.images, o.queries,
                                               optional_path(o.negative_dump));
    run = run_eval(manifest, plan, source, config);
  }
  write_report(o.out, run.report);
  out << render_summary(run.report);
  return kExitOk;
}

int cmd_sweep(const Options& o, const CLI::App& sub, std::ostream& out) {
  const bool by_size = !o.query_sizes.empty();
  const bool by_count = !o.counts.empty();
  if (by_size == by_count)
    throw ParameterError("give exactly one of --query-sizes or --counts");
  const auto manifest = load_manifest(o.manifest);
  const auto source = load_embedding_source(o.images, o.queries,
                                            optional_path(o.negative_dump));
  const auto config = eval_config(o, sub);

  const std::size_t seed_count = o.seeds > 0 ? o.seeds : (by_size ? 10 : 1);
  std::vector<std::uint64_t> seeds;
  for (std::size_t s = 0; s < seed_count; ++s)
    seeds.push_back(derive_seed(o.seed, by_size ? "sweep.query_size"
                                                : "sweep.negatives", s));

  SweepOutput sweep;
  if (by_size) {
    if (o.negatives != "none")
      throw ParameterError("query-size sweeps run without negatives");
    sweep = sweep_query_size(manifest, source, o.query_sizes, seeds,
                             NegativeSpec{}, config);
  } else {
    sweep = sweep_negatives(manifest, source,
                            negative_kind_from_string(o.negatives), o.counts,
                            seeds, config);
  }

  const fs::path dir = o.out;
  fs::create_directories(dir / "reports");
  write_text_atomic(dir / "sweep.json", to_json(sweep).dump(2) + "\n");
  write_text_atomic(dir / "sweep.csv", sweep_csv(sweep));
  for (std::size_t p = 0; p < sweep.results.size(); ++p)
    for (std::size_t s = 0; s < sweep.reports[p].size(); ++s)
      write_text_atomic(dir / "reports" /
                            (sweep.results[p].axis + "_" +
                             std::to_string(sweep.results[p].axis_value) +
                             "_seed" + std::to_string(s) + ".json"),
                        to_json(sweep.reports[p][s]).dump(2) + "\n");
  for (const auto& r : sweep.results) {
    out << r.axis << '=' << r.axis_value;
    for (const char* key : {"accuracy", "map", "ose_count"}) {
      auto it = r.mean.find(key);
      if (it != r.mean.end() && it->second)
        out << "  " << key << '=' << format_sig9(*it->second);
    }
    for (const auto& [key, value] : r.mean)
      if (key.rfind("aupr.", 0) == 0 && value)
        out << "  " << key << '=' << format_sig9(*value);
    out << '\n';
  }
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  WorldSpec spec;
  if (o.preset == "separable")
    spec = WorldSpec::separable_preset(o.seed);
  else if (o.preset == "overlap")
    spec = WorldSpec::overlap_preset(o.seed);
  else if (o.preset == "detection")
    spec = WorldSpec::detection_preset(o.seed);
  else
    throw ParameterError("unknown preset '" + o.preset + "'");
  if (o.classes) spec.class_count = *o.classes;
  if (o.open_classes) spec.open_class_count = *o.open_classes;
  if (o.dim) spec.dim = *o.dim;
  if (o.images_per_class) {
    spec.images_per_class = *o.images_per_class;
    spec.detection_images = *o.images_per_class;
  }
  if (o.noise) spec.noise_std = *o.noise;
  if (o.margin) spec.margin = *o.margin;
  spec.word_count = o.words;
  const auto world = generate_world(spec);
  write_world(o.out, spec, world);
  out << "synth: " << world.manifest.images.size() << " images, "
      << world.manifest.classes.size() << " classes, "
      << world.open_labels.size() << " held-out classes -> " << o.out << '\n';
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto report = load_report(o.in);
  if (!o.out.empty()) write_report(o.out, report);
  out << render_summary(report);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (e.id() == "coverage") return kExitCoverage;
  if (e.id() == "numeric" || e.id() == "geometry" || e.id() == "shape" ||
      e.id() == "undefined_metric")
    return kExitInternal;
  return kExitInput;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"osvlm: open-set recognition evaluation for vision-language models"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", o.workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", o.quiet, "Suppress warnings");
  app.add_option("--config", "JSON file whose keys provide default flag values");

  auto scoring_flags = [&](CLI::App* sub) {
    sub->add_option("--head", o.head, "softmax or sigmoid")
        ->check(CLI::IsMember({"softmax", "sigmoid"}));
    sub->add_option("--temperature", o.temperature, "Softmax logit scale")
        ->check(CLI::PositiveNumber);
    sub->add_option("--hist-bins", o.hist_bins, "Uncertainty histogram bins")
        ->check(CLI::PositiveNumber);
    sub->add_option("--iou", o.iou, "IoU threshold for detection TPs")
        ->check(CLI::Range(1e-9, 1.0));
  };
  const auto negative_kinds = CLI::IsMember(
      {"none", "simple-word", "random-words", "zero", "random-embeddings"});

  auto* plan = app.add_subcommand("plan", "Build the dual-pass test plan");
  plan->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  plan->add_option("--out", o.out, "Plan JSON to write")->required();
  plan->add_option("--negatives", o.negatives, "Negative query strategy")
      ->check(negative_kinds);
  plan->add_option("--negative-count", o.negative_count, "Number of negatives");
  plan->add_option("--seed", o.seed, "Base seed");
  plan->add_option("--words-out", o.words_out,
                   "Write word negatives as a JSON array for the text encoder");

  auto* score = app.add_subcommand("score", "Score dumps against a plan");
  score->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  score->add_option("--plan", o.plan, "Plan JSON")->required();
  score->add_option("--out", o.out, "Report directory")->required();
  score->add_option("--images", o.images, "Image/region embedding dump");
  score->add_option("--queries", o.queries, "Query label embedding dump");
  score->add_option("--negative-dump", o.negative_dump,
                    "Encoded word negatives dump");
  score->add_option("--score-dir", o.score_dir,
                    "Directory of per-image score dumps (score mode)");
  scoring_flags(score);

  auto* sweep = app.add_subcommand("sweep", "Negative-count or query-size sweeps");
  sweep->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  sweep->add_option("--images", o.images, "Image embedding dump")->required();
  sweep->add_option("--queries", o.queries, "Query embedding dump")->required();
  sweep->add_option("--negative-dump", o.negative_dump,
                    "Encoded random-word dump (random-words sweeps)");
  sweep->add_option("--out", o.out, "Output directory")->required();
  sweep->add_option("--query-sizes", o.query_sizes, "Comma-separated sizes")
      ->delimiter(',');
  sweep->add_option("--negatives", o.negatives,
                    "random-words or random-embeddings")
      ->check(negative_kinds);
  sweep->add_option("--counts", o.counts, "Comma-separated negative counts")
      ->delimiter(',');
  sweep->add_option("--seeds", o.seeds, "Number of seeds per axis value");
  sweep->add_option("--seed", o.seed, "Base seed");
  scoring_flags(sweep);

  auto* synth = app.add_subcommand("synth", "Write a synthetic embedding world");
  synth->add_option("--preset", o.preset, "separable, overlap or detection")
      ->check(CLI::IsMember({"separable", "overlap", "detection"}));
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Seed");
  synth->add_option("--classes", o.classes, "Known classes");
  synth->add_option("--open-classes", o.open_classes, "Held-out classes");
  synth->add_option("--dim", o.dim, "Embedding dimension");
  synth->add_option("--images-per-class", o.images_per_class,
                    "Images per class (image count for detection)");
  synth->add_option("--noise", o.noise, "Noise standard deviation");
  synth->add_option("--margin", o.margin, "Minimum direction angle (radians)");
  synth->add_option("--words", o.words, "Random-word negatives to emit");

  auto* report = app.add_subcommand("report", "Re-render a stored report");
  report->add_option("--in", o.in, "report.json")->required();
  report->add_option("--out", o.out, "Directory for JSON/CSV re-rendering");

  try {
    auto args = expand_config(raw_args);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitInput;
    }
    set_warnings_enabled(!o.quiet);
    kernels::set_worker_count(o.workers);

    if (plan->parsed()) return cmd_plan(o, out);
    if (score->parsed()) return cmd_score(o, *score, out);
    if (sweep->parsed()) return cmd_sweep(o, *sweep, out);
    if (synth->parsed()) return cmd_synth(o, out);
    if (report->parsed()) return cmd_report(o, out);
    return kExitInput;
  } catch (const Error& e) {
    err << "error[" << e.id() << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace osv::cli
