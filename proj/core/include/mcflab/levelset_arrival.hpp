#pragma once

// Arrival time t(x) of curvature flow on a planar convex domain, computed by
// evolving phi_tau = |grad phi| div(grad phi / |grad phi|) from the signed
// distance and recording when each node's sign flips.

#include <cstdint>
#include <span>
#include <vector>

#include "mcflab/common.hpp"
#include "mcflab/convex_flow.hpp"

namespace mcflab {

/// Uniform node grid, node (i, j) at origin + dx (i, j), stored row-major in j.
struct CartesianGrid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  Vec2 origin{0.0, 0.0};

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  Vec2 node(int i, int j) const { return {origin[0] + dx * i, origin[1] + dx * j}; }
};

/// Square grid of `nodes` per side centered at `center` with half-width `half_width`.
CartesianGrid square_grid(int nodes, Vec2 center, double half_width);

/// Signed distance samples, negative inside the domain.
struct LevelSetGrid {
  CartesianGrid grid;
  std::vector<double> phi;
};

LevelSetGrid disk_domain(const CartesianGrid& grid, double radius, Vec2 center = {0.0, 0.0});
/// Semi-axes a along x and b along y; distance by Newton on the closest point.
LevelSetGrid ellipse_domain(const CartesianGrid& grid, double a, double b, Vec2 center = {0.0, 0.0});
/// Axis-aligned box with half-widths (hx, hy).
LevelSetGrid box_domain(const CartesianGrid& grid, double hx, double hy, Vec2 center = {0.0, 0.0});

/// t_B(x) = (r^2 - |x - x0|^2) / (2n). Throws ErrorCode::domain outside the ball.
double ball_arrival_exact(std::span<const double> x, double r, std::span<const double> x0, int n);

struct ArrivalControls {
  double dt_factor = 0.25;     // dt = dt_factor * dx^2, at most 0.25
  int reinit_every = 50;       // steps between gradient checks
  double reinit_drift = 0.5;   // reinitialize when | |grad phi| - 1 | exceeds this at the front
  double eps = 1e-8;           // regularization of |grad phi|^2
  std::int64_t max_steps = 0;  // 0: derived from the domain size
};

struct ArrivalField {
  CartesianGrid grid;
  std::vector<double> values;  // NaN outside the domain
  std::vector<std::uint8_t> flags;  // 1: arrived after the front fell below 2 dx
  double T_hat = 0.0;
  Vec2 x0_hat{0.0, 0.0};
  bool truncated = false;      // the front became unresolved before extinction
  std::int64_t steps = 0;
  int reinitializations = 0;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Throws ErrorCode::invalid_input for a domain resolved by fewer than 64
/// cells across and ErrorCode::step_rejected when dt_factor exceeds 1/4.
ArrivalField solve_arrival(const LevelSetGrid& domain, const ArrivalControls& controls = {});

/// Arrival field sampled on `grid` from a support-function flow: t(x) solves
/// min_theta (h(theta, t) - x . e_theta) = 0, cubic Hermite in t between
/// logged states. Nodes outside `initial` or inside the final state are NaN.
ArrivalField arrival_from_trajectory(const SupportFunction& initial, const FlowTrajectory& traj,
                                     const CartesianGrid& grid);

/// Closed-form field t(x) = t_fn(x) on the nodes where it is finite.
template <typename F>
ArrivalField tabulate_arrival(const CartesianGrid& grid, F&& t_fn) {
  ArrivalField out;
  out.grid = grid;
  out.values.resize(grid.size());
  out.flags.assign(grid.size(), 0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) out.values[grid.index(i, j)] = t_fn(grid.node(i, j));
  }
  return out;
}

struct AnnulusResidual {
  double inner_radius = 0.0;
  double amplitude = 0.0;  // max |R| over the annulus
  int samples = 0;
  bool resolved = false;   // fully inside the field and above the floor
};

struct ResidualExponent {
  double annulus_radius = 0.0;  // inner radius of the outer annulus of the pair
  double exponent = 0.0;
};

struct ResidualReport {
  int order = 0;
  double floor = 0.0;
  std::vector<AnnulusResidual> annuli;
  std::vector<ResidualExponent> exponents;  // consecutive resolved pairs
  double fitted_exponent = 0.0;             // NaN when fewer than two resolved annuli
  bool at_floor = false;                    // every annulus at or below the floor
  bool partial = false;                     // some annuli were dropped
};

/// R(x) = t(x) - T + |x - x0|^2 / 2 on dyadic annuli [r, 2r) around x0,
/// starting at r_min (default 4 dx). Throws ErrorCode::invalid_input for N < 3.
ResidualReport asymptotic_residual(const ArrivalField& field, double T, Vec2 x0, int order,
                                   double floor = 1e-12, double r_min = 0.0);

/// max |t - t_B| over defined nodes farther than `collar` from x0.
double ball_error(const ArrivalField& field, double r, Vec2 x0, double collar);

}  // namespace mcflab
