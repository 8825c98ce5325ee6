#pragma once

// Parabolic rescaling of a flow trajectory, y = (x - x0) / sqrt(T - tau),
// s = -log(T - tau), and extraction of the graph u(., s) over the circle of
// radius sqrt(2).
//
// Graphs are radial: u(phi) = rho(phi) - sqrt(2) where rho is the radial
// function of the rescaled curve. Radial and normal graphs over the circle
// agree up to O(u^2 + u_phi^2).

#include <optional>
#include <vector>

#include "mcflab/convex_flow.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace mcflab {

/// Extinction time and point used for the rescaling.
struct Gauge {
  double T = 0.0;
  Vec2 x0{0.0, 0.0};
};

/// A rescaled convex curve, kept as its support function about the origin.
struct RescaledBoundary {
  double s = 0.0;
  double time_to_go = 0.0;
  SupportFunction support;  // (h - x0 . e_theta) / sqrt(T - tau)

  std::vector<Vec2> points() const;
};

struct GraphSnapshot {
  double s = 0.0;
  SphereGrid grid = SphereGrid::circle(64);
  std::vector<double> u;
  SpectralCoeffs coeffs;
};

/// Rescale with an explicit remaining time T - tau.
RescaledBoundary rescale_snapshot(const SupportFunction& shape, double time_to_go, Vec2 x0);
/// Rescale with extinction time T. Throws ErrorCode::domain when tau >= T.
RescaledBoundary rescale_with_gauge(const SupportFunction& shape, const Gauge& gauge);

/// Radial graph of the rescaled curve on the nodes of `grid`, band-limited to
/// l_max (default grid.dealiased_capacity()). Throws
/// ErrorCode::not_star_shaped if the origin is not strictly inside the curve
/// and ErrorCode::graph_condition if sqrt(2) + u <= 0 anywhere.
GraphSnapshot extract_graph(const RescaledBoundary& boundary, const SphereGrid& grid,
                            std::optional<int> l_max = std::nullopt);

/// Builds a GraphSnapshot from band-limited samples: coeffs = analyze(u).
GraphSnapshot make_graph_snapshot(double s, const SphereGrid& grid, std::vector<double> u,
                                  std::optional<int> l_max = std::nullopt);
GraphSnapshot make_graph_snapshot(double s, const SphereGrid& grid, const SpectralCoeffs& coeffs);

/// max over the rescaled curve of | |y| - radius |.
double hausdorff_to_circle(const RescaledBoundary& boundary, double radius);

/// Sup-norm decay rate of u implied by an arrival-time expansion of order N:
/// N/2 - 1. Requires N > 2.
double decay_exponent_map(int order);
/// Inverse map: order N = 2 (rate + 1).
double order_from_rate(double rate);

struct ModeTrackPoint {
  double s = 0.0;
  ModeBlock block;
};

struct GraphTrajectory {
  Gauge gauge;
  std::vector<GraphSnapshot> snapshots;  // increasing s
  std::vector<double> omitted_s;         // snapshots that were not graphs
  std::optional<double> first_valid_s;
  std::vector<ModeTrackPoint> l0_track;
  std::vector<ModeTrackPoint> l1_track;
};

/// Remaining time T - tau of a logged snapshot under `gauge`, using the
/// area-law remaining time of the snapshot shifted by T - T_hat.
double gauge_time_to_go(const FlowTrajectory& traj, const FlowSnapshot& snap, const Gauge& gauge);

/// The gauge the trajectory estimated for itself.
Gauge estimated_gauge(const FlowTrajectory& traj);

GraphTrajectory build_graph_trajectory(const FlowTrajectory& traj, const SphereGrid& grid,
                                       const Gauge& gauge);

}  // namespace mcflab
