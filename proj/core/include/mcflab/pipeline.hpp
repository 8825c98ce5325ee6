#pragma once

// Experiment configuration and the end-to-end run:
// shape -> flow -> rescaled graphs -> spectra -> checks -> artifact bundle.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcflab/convex_flow.hpp"
#include "mcflab/estimates_lab.hpp"
#include "mcflab/levelset_arrival.hpp"
#include "mcflab/report.hpp"
#include "mcflab/rescale_graph.hpp"

namespace mcflab {

struct ExperimentConfig {
  std::string name = "run";
  std::uint64_t seed = 1;
  std::string output_dir;             // empty: keep the bundle in memory
  // certificate, key_inequality, sup_bound, duhamel, quadratic_bound, arrival
  std::vector<std::string> checks{"certificate"};

  std::string shape = "circle";       // circle | ball | ellipse | perturbed-circle
  double radius = 1.0;                // circle and ball
  double axis_a = 1.2;                // ellipse
  double axis_b = 1.0 / 1.2;
  double amplitude = 0.1;             // perturbed-circle, see PerturbationSpec
  int modes = 6;
  double shift = 0.2;

  int support_nodes = 256;
  int graph_nodes = 64;
  int arrival_nodes = 256;

  double cfl = 0.5;
  double area_floor = 1e-6;
  double snapshot_ds = 0.05;

  std::string gauge = "exact";        // exact | estimated
  double gauge_dT = 0.0;              // offsets added to the chosen gauge
  double gauge_dx0 = 0.0;
  double gauge_dy0 = 0.0;

  int r = 2;
  double window_begin = 5.0;
  double window_end = 10.0;
  double arrival_tolerance = 2e-3;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Presets: circle, ball, ellipse, perturbed-circle. Throws
/// ErrorCode::invalid_input for an unknown name.
ExperimentConfig preset_config(const std::string& name);

/// Canonical INI text: fixed section and key order, shortest round-trip doubles.
std::string to_ini(const ExperimentConfig& config);
/// Parses INI text; missing keys keep their defaults, unknown keys are rejected.
ExperimentConfig parse_ini(const std::string& text);
/// Throws ErrorCode::invalid_input naming the offending field.
void validate(const ExperimentConfig& config);

SupportFunction initial_shape(const ExperimentConfig& config);
/// Extinction time and point for the configured gauge policy, offsets included.
Gauge choose_gauge(const ExperimentConfig& config, const SupportFunction& initial,
                   const FlowTrajectory& flow);

struct BundleFile {
  std::string name;
  std::string content;
  std::string sha256;
};

struct PipelineResult {
  ExperimentConfig config;
  FlowTrajectory flow;
  GraphTrajectory graph;
  std::optional<ArrivalField> arrival;
  std::vector<VerificationReport> reports;  // sorted by check name
  std::vector<BundleFile> files;            // sorted by name, manifest last
  std::string manifest;

  /// Report by check name, or nullptr.
  const VerificationReport* report(const std::string& check) const;
  /// True if any verdict is fail or violation.
  bool failed() const;
};

/// Deterministic in (config, seed). Stage failures are rethrown with the
/// stage name prefixed. Writes the bundle when output_dir is set.
PipelineResult run_pipeline(const ExperimentConfig& config);

/// Reads a manifest written by run_pipeline and rechecks every listed file.
/// Returns the names that are missing or whose checksum differs.
std::vector<std::string> verify_manifest(const std::string& output_dir);

struct SweepRow {
  std::string name;
  std::string shape;
  std::uint64_t seed = 0;
  double rate = 0.0;        // fitted certificate rate, NaN if none
  std::string verdict;      // certificate verdict, or "error"
  double min_margin = 0.0;  // over all reports, NaN if none
  std::string error;
};

/// Copies of `base` with seeds first, first + 1, ..., named "<name>-<seed>".
std::vector<ExperimentConfig> seed_range(const ExperimentConfig& base, std::uint64_t first, int count);

/// Runs each config independently on up to `jobs` threads; a failing run
/// becomes an error row. Bundles are not written.
std::vector<SweepRow> sweep(std::span<const ExperimentConfig> configs, int jobs = 1);
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace mcflab
