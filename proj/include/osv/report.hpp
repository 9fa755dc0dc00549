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

// EvalReport: the metric bundle of one dual-pass run, plus its JSON and
// CSV renderings. Floats are written with 9 significant digits; metrics
// that cannot be computed are JSON null and "-" in text output.

#ifndef OSV_REPORT_HPP_
#define OSV_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "osv/manifest.hpp"
#include "osv/metrics.hpp"

namespace osv {

inline constexpr int kReportSchemaVersion = 1;

struct MeasureReport {
  // "cosine", "softmax", "sigmoid" or "entropy".
  std::string name;
  std::optional<double> aupr;
  std::optional<double> auroc;
  std::optional<double> p_at_95r;
  std::optional<double> r_at_95p;
  std::vector<CurvePoint> curve;
  UncertaintyHistogram histogram;
};

MeasureReport evaluate_measure(std::string name,
                               std::span<const double> tp_psi,
                               std::span<const double> ose_psi,
                               std::size_t histogram_bins);

struct EvalReport {
  Task task = Task::kClassification;
  std::optional<double> accuracy;
  std::optional<double> map;
  std::vector<std::string> classes;
  std::vector<std::optional<double>> per_class_ap;

  std::size_t tp_count = 0;
  std::size_t ose_count = 0;
  std::size_t closed_images = 0;
  std::size_t open_images = 0;
  std::size_t closed_predictions = 0;
  std::size_t closed_rejected = 0;
  std::size_t open_predictions = 0;
  std::size_t open_rejected = 0;

  std::vector<MeasureReport> measures;
  std::vector<CaptureStats> negative_capture;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  const MeasureReport* measure(std::string_view name) const;
};

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& j);

// "threshold,precision,recall,kept_tp,kept_ose"
std::string curve_csv(const MeasureReport& measure);
// "bin,lower,upper,tp_mass,ose_mass"
std::string histogram_csv(const MeasureReport& measure);
// Human-readable summary table.
std::string render_summary(const EvalReport& report);

// report.json plus curve_<measure>.csv and histogram_<measure>.csv.
void write_report(const std::filesystem::path& dir, const EvalReport& report);
EvalReport load_report(const std::filesystem::path& path);

}  // namespace osv

#endif  // OSV_REPORT_HPP_
