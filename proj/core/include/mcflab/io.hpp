#pragma once

// Text serialization of lab artifacts: JSON, JSONL and CSV. All writers are
// deterministic (fixed key order, round-trip precision for doubles).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "mcflab/convex_flow.hpp"
#include "mcflab/levelset_arrival.hpp"
#include "mcflab/report.hpp"
#include "mcflab/rescale_graph.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace mcflab::io {

/// {"n", "l_max", "blocks": [[l, c_cos, c_sin], ...]}
std::string coeffs_json(const SpectralCoeffs& coeffs);
/// Throws ErrorCode::io on malformed input.
SpectralCoeffs parse_coeffs_json(const std::string& text);

/// Rows "l,nu,lambda".
std::string spectrum_csv(const ModeSpectrum& spectrum);

struct TrajectoryHeader {
  std::string shape;
  NamedValues params;
  std::string dtau_policy;
  std::uint64_t seed = 0;
};

/// Header line {shape, params, dtau_policy, seed, T_hat, x0_hat}, then one
/// record per snapshot {tau, m, h, area, length, time_to_go}.
std::string trajectory_jsonl(const FlowTrajectory& traj, const TrajectoryHeader& header);

/// One record per graph snapshot {s, l_max, coeffs, sup_norm, h_norms}.
std::string graph_jsonl(const GraphTrajectory& traj, int r_max = 6);

/// {check, params, inputs_digest, tolerance, margins, verdict, note, metrics}.
std::string report_json(const VerificationReport& report);
/// Header "check,verdict,min_margin,tolerance,note" and one row per report.
std::string summary_csv(std::span<const VerificationReport> reports);

/// {nx, ny, dx, origin}
std::string arrival_header_json(const CartesianGrid& grid);
/// Rows "x,y,t" for the defined nodes.
std::string arrival_csv(const ArrivalField& field);
/// Rows "annulus_radius,exponent".
std::string residual_csv(const ResidualReport& report);

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mcflab::io
