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

#include "osv/report.hpp"

#include <cstdio>
#include <sstream>

#include "osv/error.hpp"
#include "osv/io_util.hpp"

namespace osv {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json num(double v) { return round_sig9(v); }

ordered_json opt(const std::optional<double>& v) {
  return v ? num(*v) : ordered_json(nullptr);
}

std::optional<double> opt_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *v * 100.0);
  return buf;
}

ordered_json numbers(const std::vector<double>& values) {
  ordered_json out = ordered_json::array();
  for (double v : values) out.push_back(num(v));
  return out;
}

}  // namespace

MeasureReport evaluate_measure(std::string name,
                               std::span<const double> tp_psi,
                               std::span<const double> ose_psi,
                               std::size_t histogram_bins) {
  MeasureReport m;
  m.name = std::move(name);
  if (!tp_psi.empty()) {
    m.curve = pr_curve(tp_psi, ose_psi);
    m.aupr = aupr(m.curve);
    m.p_at_95r = precision_at_recall(m.curve);
    m.r_at_95p = recall_at_precision(m.curve);
  }
  if (!tp_psi.empty() && !ose_psi.empty()) m.auroc = auroc(tp_psi, ose_psi);
  m.histogram = uncertainty_histogram(tp_psi, ose_psi, histogram_bins);
  return m;
}

const MeasureReport* EvalReport::measure(std::string_view name) const {
  for (const auto& m : measures)
    if (m.name == name) return &m;
  return nullptr;
}

ordered_json to_json(const EvalReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["task"] = std::string(to_string(report.task));
  j["accuracy"] = opt(report.accuracy);
  j["map"] = opt(report.map);
  ordered_json counts;
  counts["tp"] = report.tp_count;
  counts["ose"] = report.ose_count;
  counts["closed_images"] = report.closed_images;
  counts["open_images"] = report.open_images;
  counts["closed_predictions"] = report.closed_predictions;
  counts["closed_rejected"] = report.closed_rejected;
  counts["open_predictions"] = report.open_predictions;
  counts["open_rejected"] = report.open_rejected;
  j["counts"] = std::move(counts);
  if (report.task == Task::kDetection) {
    ordered_json ap = ordered_json::array();
    for (std::size_t c = 0; c < report.per_class_ap.size(); ++c)
      ap.push_back({{"class", report.classes.at(c)},
                    {"ap", opt(report.per_class_ap[c])}});
    j["per_class_ap"] = std::move(ap);
  }

  ordered_json measures = ordered_json::array();
  for (const auto& m : report.measures) {
    ordered_json e;
    e["name"] = m.name;
    e["aupr"] = opt(m.aupr);
    e["p_at_95r"] = opt(m.p_at_95r);
    e["r_at_95p"] = opt(m.r_at_95p);
    e["auroc"] = opt(m.auroc);
    ordered_json curve;
    ordered_json th = ordered_json::array(), pr = ordered_json::array(),
                 rc = ordered_json::array(), kt = ordered_json::array(),
                 ko = ordered_json::array();
    for (const auto& p : m.curve) {
      th.push_back(num(p.threshold));
      pr.push_back(num(p.precision));
      rc.push_back(num(p.recall));
      kt.push_back(p.kept_tp);
      ko.push_back(p.kept_ose);
    }
    curve["threshold"] = std::move(th);
    curve["precision"] = std::move(pr);
    curve["recall"] = std::move(rc);
    curve["kept_tp"] = std::move(kt);
    curve["kept_ose"] = std::move(ko);
    e["curve"] = std::move(curve);
    const auto& h = m.histogram;
    ordered_json hist;
    hist["lower"] = num(h.lower);
    hist["upper"] = num(h.upper);
    hist["bins"] = h.bins;
    std::vector<double> edges;
    for (std::size_t i = 0; i <= h.bins; ++i) edges.push_back(h.edge(i));
    hist["edges"] = numbers(edges);
    hist["tp_mass"] = numbers(h.tp_mass);
    hist["ose_mass"] = numbers(h.ose_mass);
    hist["tp_empty"] = h.tp_empty;
    hist["ose_empty"] = h.ose_empty;
    e["histogram"] = std::move(hist);
    measures.push_back(std::move(e));
  }
  j["measures"] = std::move(measures);

  ordered_json capture = ordered_json::array();
  for (std::size_t s = 0; s < report.negative_capture.size(); ++s)
    capture.push_back({{"slot", s},
                       {"closed_captured", report.negative_capture[s].closed_captured},
                       {"open_captured", report.negative_capture[s].open_captured}});
  j["negative_capture"] = std::move(capture);
  j["metadata"] = report.metadata;
  return j;
}

EvalReport report_from_json(const ordered_json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw FormatError("unsupported report schema version");
    EvalReport r;
    r.task = task_from_string(j.at("task").get<std::string>());
    r.accuracy = opt_from(j, "accuracy");
    r.map = opt_from(j, "map");
    const auto& c = j.at("counts");
    r.tp_count = c.at("tp").get<std::size_t>();
    r.ose_count = c.at("ose").get<std::size_t>();
    r.closed_images = c.at("closed_images").get<std::size_t>();
    r.open_images = c.at("open_images").get<std::size_t>();
    r.closed_predictions = c.at("closed_predictions").get<std::size_t>();
    r.closed_rejected = c.at("closed_rejected").get<std::size_t>();
    r.open_predictions = c.at("open_predictions").get<std::size_t>();
    r.open_rejected = c.at("open_rejected").get<std::size_t>();
    if (j.contains("per_class_ap")) {
      for (const auto& e : j["per_class_ap"]) {
        r.classes.push_back(e.at("class").get<std::string>());
        r.per_class_ap.push_back(opt_from(e, "ap"));
      }
    }
    for (const auto& e : j.at("measures")) {
      MeasureReport m;
      m.name = e.at("name").get<std::string>();
      m.aupr = opt_from(e, "aupr");
      m.p_at_95r = opt_from(e, "p_at_95r");
      m.r_at_95p = opt_from(e, "r_at_95p");
      m.auroc = opt_from(e, "auroc");
      const auto& curve = e.at("curve");
      const auto& th = curve.at("threshold");
      for (std::size_t i = 0; i < th.size(); ++i)
        m.curve.push_back(CurvePoint{th[i].get<double>(),
                                     curve.at("precision")[i].get<double>(),
                                     curve.at("recall")[i].get<double>(),
                                     curve.at("kept_tp")[i].get<std::size_t>(),
                                     curve.at("kept_ose")[i].get<std::size_t>()});
      const auto& h = e.at("histogram");
      m.histogram.lower = h.at("lower").get<double>();
      m.histogram.upper = h.at("upper").get<double>();
      m.histogram.bins = h.at("bins").get<std::size_t>();
      m.histogram.edges = h.at("edges").get<std::vector<double>>();
      if (m.histogram.edges.size() != m.histogram.bins + 1)
        throw FormatError("histogram edges do not match the bin count");
      m.histogram.tp_mass = h.at("tp_mass").get<std::vector<double>>();
      m.histogram.ose_mass = h.at("ose_mass").get<std::vector<double>>();
      m.histogram.tp_empty = h.at("tp_empty").get<bool>();
      m.histogram.ose_empty = h.at("ose_empty").get<bool>();
      r.measures.push_back(std::move(m));
    }
    for (const auto& e : j.at("negative_capture"))
      r.negative_capture.push_back(
          CaptureStats{e.at("closed_captured").get<std::size_t>(),
                       e.at("open_captured").get<std::size_t>()});
    r.metadata = j.at("metadata");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string curve_csv(const MeasureReport& measure) {
  std::ostringstream out;
  out << "threshold,precision,recall,kept_tp,kept_ose\n";
  for (const auto& p : measure.curve)
    out << format_sig9(p.threshold) << ',' << format_sig9(p.precision) << ','
        << format_sig9(p.recall) << ',' << p.kept_tp << ',' << p.kept_ose
        << '\n';
  return out.str();
}

std::string histogram_csv(const MeasureReport& measure) {
  const auto& h = measure.histogram;
  std::ostringstream out;
  out << "bin,lower,upper,tp_mass,ose_mass\n";
  for (std::size_t b = 0; b < h.bins; ++b)
    out << b << ',' << format_sig9(h.edge(b)) << ','
        << format_sig9(h.edge(b + 1)) << ',' << format_sig9(h.tp_mass[b])
        << ',' << format_sig9(h.ose_mass[b]) << '\n';
  return out.str();
}

std::string render_summary(const EvalReport& report) {
  std::ostringstream out;
  out << "task: " << to_string(report.task) << '\n';
  if (report.task == Task::kClassification)
    out << "accuracy: " << percent(report.accuracy) << '\n';
  else
    out << "mAP@0.5: " << percent(report.map) << '\n';
  out << "TP: " << report.tp_count << "  OSE: " << report.ose_count
      << "  rejected (closed/open): " << report.closed_rejected << '/'
      << report.open_rejected << '\n';
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s\n", "measure",
                "AuPR", "P@95R", "R@95P", "AuROC");
  out << line;
  for (const auto& m : report.measures) {
    std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s\n",
                  m.name.c_str(), percent(m.aupr).c_str(),
                  percent(m.p_at_95r).c_str(), percent(m.r_at_95p).c_str(),
                  percent(m.auroc).c_str());
    out << line;
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const auto& m : report.measures) {
    write_text_atomic(dir / ("curve_" + m.name + ".csv"), curve_csv(m));
    write_text_atomic(dir / ("histogram_" + m.name + ".csv"), histogram_csv(m));
  }
}

EvalReport load_report(const std::filesystem::path& path) {
  try {
    return report_from_json(ordered_json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace osv
