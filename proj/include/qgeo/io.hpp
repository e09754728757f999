#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "qgeo/chart.hpp"
#include "qgeo/dynamics.hpp"
#include "qgeo/info.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/moments.hpp"

namespace qgeo {

using Json = nlohmann::json;

/// Minimal TOML reader covering the scenario format: [tables], dotted keys,
/// strings, numbers, booleans, flat arrays, # comments.
Json toml_to_json(const std::string& text);

/// Loads .toml or .json by extension (falls back to content sniffing).
Json load_config_file(const std::string& path);

Json to_json(const MomentState& s);
MomentState moment_state_from_json(const Json& j);

Json to_json(const CanonicalChart& c);
CanonicalChart chart_from_json(const Json& j);

Json to_json(const InfoReport& r);
Json to_json(const PhysicalityReport& r);

/// Metric block: {"name": "minkowski"|"weak_field"|"schwarzschild"|"vortical_test",
///                "params": {...}, "c": 1.0}
std::shared_ptr<const MetricField> metric_from_config(const Json& j);

struct ScenarioConfig {
  Json metric;  // kept verbatim for round-tripping
  bool state_is_chart = true;
  CanonicalChart chart;
  MomentVector delta{};
  Vec4 mean_x = Vec4::Zero();
  Vec4 mean_p = Vec4::Zero();
  std::optional<CanonicalChart> chart_b;  // clock-pair comparison mode
  double m = 1.0;
  double hbar = 1.0;
  double tau_end = 10.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 0.0;
  int sample_every = 10;
  double constraint_tol_rel = 1e-6;
  bool classical_mode = false;
  /// Raw stop block: "areal_radius" | "isotropic_radius" | "coordinate_time".
  std::string stop_kind;
  double stop_value = 0.0;
  std::uint64_t seed = 0;
  std::string out_csv;
  std::string out_summary;
};

ScenarioConfig parse_scenario(const Json& j);
Json scenario_to_json(const ScenarioConfig& cfg);

/// Maps the raw stop block onto the integrator's condition; areal radii are
/// converted to isotropic thresholds through the scenario's metric.
StopCondition resolved_stop(const ScenarioConfig& cfg);

/// Builds the initial extended state from a scenario (solves the mass shell
/// for p_t).
ExtendedState initial_state(const ScenarioConfig& cfg);
ExtendedState initial_state(const ScenarioConfig& cfg, const CanonicalChart& chart);

/// Fixed 17-significant-digit formatting for deterministic CSV output.
std::string format_g17(double v);

/// One row per sample; fixed column order documented in the header line.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);
std::string trajectory_csv_string(const TrajectoryRecord& rec);

Json run_summary(const TrajectoryRecord& rec, double tau_q);

/// Honors the QGEO_OUTPUT_DIR override for relative output paths.
std::string resolve_output_path(const std::string& path);

}  // namespace qgeo
