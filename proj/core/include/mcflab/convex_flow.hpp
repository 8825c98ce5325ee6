#pragma once

// Curve shortening of convex planar curves through their support function
// h(theta), which evolves by dh/dtau = -1 / (h + h'').

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcflab/common.hpp"

namespace mcflab {

/// Support function samples at theta_j = 2*pi*j/m, at flow time tau.
struct SupportFunction {
  std::vector<double> h;
  double tau = 0.0;

  int nodes() const { return static_cast<int>(h.size()); }
  double angle(int j) const;
};

SupportFunction circle_support(int m, double radius, Vec2 center = {0.0, 0.0});
/// Ellipse with semi-axes a (along x) and b (along y).
SupportFunction ellipse_support(int m, double a, double b, Vec2 center = {0.0, 0.0});

/// A random convex perturbation of the unit circle. Modes 2..modes get
/// coefficients uniform in [-amplitude, amplitude] / l^2, and the center is
/// shifted uniformly within [-shift, shift]^2. Convexity is checked.
struct PerturbationSpec {
  std::uint64_t seed = 1;
  double amplitude = 0.1;
  int modes = 6;
  double shift = 0.2;
};
SupportFunction perturbed_circle_support(int m, const PerturbationSpec& spec);

/// Radius of curvature h + h'' at each node.
std::vector<double> curvature_radius(const SupportFunction& sf);
/// kappa = 1 / (h + h''). Throws ErrorCode::convexity_loss when h + h'' <= 0.
std::vector<double> curvature_from_support(const SupportFunction& sf);

double enclosed_area(const SupportFunction& sf);   // (1/2) int (h^2 - h'^2)
double perimeter(const SupportFunction& sf);       // int h
Vec2 steiner_point(const SupportFunction& sf);     // (1/pi) int h (cos, sin)
/// Boundary point with outer normal (cos theta_j, sin theta_j).
std::vector<Vec2> boundary_points(const SupportFunction& sf);

/// Largest time step for which explicit RK4 is linearly stable on this shape.
double stable_time_step(const SupportFunction& sf);

/// One classical RK4 step of dh/dtau = -1/(h + h''). Throws
/// ErrorCode::step_rejected when dtau exceeds the stability bound and
/// ErrorCode::convexity_loss if any stage loses convexity.
SupportFunction step_flow(const SupportFunction& sf, double dtau);

struct FlowControls {
  double cfl = 0.5;             // fraction of the stable RK4 step
  double area_floor = 1e-6;     // stop once area < area_floor * area(0)
  double snapshot_ds = 0.05;    // snapshot spacing in s = -log(T - tau)
  double max_s = 1e300;         // no snapshots beyond this s
  std::int64_t max_steps = 50'000'000;
};

/// A logged shape. time_to_go is the remaining time A / (2 pi) given by the
/// area law, which for curves is exact and keeps full relative precision
/// close to extinction.
struct FlowSnapshot {
  SupportFunction shape;
  double area = 0.0;
  double length = 0.0;
  double time_to_go = 0.0;
};

struct ExtinctionEstimate {
  double T = 0.0;
  Vec2 x0{0.0, 0.0};
  bool converged = false;
  int iterations = 0;
  double last_correction = 0.0;
};

struct FlowTrajectory {
  std::vector<FlowSnapshot> snapshots;  // ordered by tau
  FlowSnapshot final_state;
  std::int64_t steps = 0;
  FlowControls controls;
  double T_hat = 0.0;
  Vec2 x0_hat{0.0, 0.0};
  bool x0_converged = false;
};

/// Flows until the area drops below the configured floor, logging snapshots
/// at s = k * snapshot_ds, then fills in the extinction estimates.
FlowTrajectory run_to_extinction(const SupportFunction& initial, const FlowControls& controls = {});

/// T from the area law T = tau + A / (2 pi) at the final state. x0 starts at
/// the Steiner point of the final state and is refined until the l = 1
/// content of the rescaled shapes shows no exp(s/2) growth.
ExtinctionEstimate extinction_estimates(const FlowTrajectory& traj);

}  // namespace mcflab
