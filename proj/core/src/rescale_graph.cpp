#include "mcflab/rescale_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mcflab {

using std::numbers::pi;

std::vector<Vec2> RescaledBoundary::points() const { return boundary_points(support); }

RescaledBoundary rescale_snapshot(const SupportFunction& shape, double time_to_go, Vec2 x0) {
  if (!(time_to_go > 0.0)) {
    std::ostringstream os;
    os << "cannot rescale at tau = " << shape.tau << ": remaining time " << time_to_go
       << " is not positive";
    throw Error(ErrorCode::domain, os.str());
  }
  RescaledBoundary out;
  out.time_to_go = time_to_go;
  out.s = -std::log(time_to_go);
  out.support.tau = shape.tau;
  out.support.h.resize(shape.h.size());
  const double scale = 1.0 / std::sqrt(time_to_go);
  for (int j = 0; j < shape.nodes(); ++j) {
    const double t = shape.angle(j);
    out.support.h[j] = (shape.h[j] - x0[0] * std::cos(t) - x0[1] * std::sin(t)) * scale;
  }
  return out;
}

RescaledBoundary rescale_with_gauge(const SupportFunction& shape, const Gauge& gauge) {
  return rescale_snapshot(shape, gauge.T - shape.tau, gauge.x0);
}

GraphSnapshot make_graph_snapshot(double s, const SphereGrid& grid, std::vector<double> u,
                                  std::optional<int> l_max) {
  GraphSnapshot out;
  out.s = s;
  out.grid = grid;
  out.coeffs = analyze(u, grid, l_max.value_or(grid.dealiased_capacity()));
  out.u = synthesize(out.coeffs, grid);
  return out;
}

GraphSnapshot make_graph_snapshot(double s, const SphereGrid& grid, const SpectralCoeffs& coeffs) {
  GraphSnapshot out;
  out.s = s;
  out.grid = grid;
  out.u = synthesize(coeffs, grid);
  out.coeffs = analyze(out.u, grid, coeffs.l_max());
  return out;
}

GraphSnapshot extract_graph(const RescaledBoundary& boundary, const SphereGrid& grid,
                            std::optional<int> l_max) {
  const auto& h = boundary.support.h;
  for (int j = 0; j < boundary.support.nodes(); ++j) {
    if (!(h[j] > 0.0)) {
      std::ostringstream os;
      os << "rescaled curve at s = " << boundary.s
         << " is not star shaped about the origin: support value " << h[j]
         << " at angle " << boundary.support.angle(j);
      throw Error(ErrorCode::not_star_shaped, os.str());
    }
  }
  const TrigInterpolant support(h);
  const double radius = grid.radius();
  std::vector<double> u(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j < grid.nodes(); ++j) {
    const double phi = grid.angle(j);
    // Solve for the normal angle theta whose boundary point lies on the ray phi:
    // g(theta) = h sin(theta - phi) + h' cos(theta - phi) = 0.
    double theta = phi;
    for (int it = 0; it < 60; ++it) {
      const auto jet = support.evaluate(theta);
      const double d = theta - phi;
      const double g = jet.value * std::sin(d) + jet.first * std::cos(d);
      const double dg = (jet.value + jet.second) * std::cos(d);
      if (!(dg > 0.0)) {
        std::ostringstream os;
        os << "radial extraction failed at angle " << phi << ", s = " << boundary.s;
        throw Error(ErrorCode::not_star_shaped, os.str());
      }
      const double step = std::clamp(g / dg, -0.5, 0.5);
      theta -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const auto jet = support.evaluate(theta);
    const double d = theta - phi;
    const double rho = jet.value * std::cos(d) - jet.first * std::sin(d);
    if (!(rho > 0.0)) {
      std::ostringstream os;
      os << "graph condition violated at angle " << phi << ", s = " << boundary.s;
      throw Error(ErrorCode::graph_condition, os.str());
    }
    u[j] = rho - radius;
  }
  return make_graph_snapshot(boundary.s, grid, std::move(u), l_max);
}

double hausdorff_to_circle(const RescaledBoundary& boundary, double radius) {
  double out = 0.0;
  for (const auto& p : boundary.points()) out = std::max(out, std::abs(norm(p) - radius));
  return out;
}

double decay_exponent_map(int order) {
  if (order <= 2) throw Error(ErrorCode::invalid_input, "expansion order must exceed 2");
  return order / 2.0 - 1.0;
}

double order_from_rate(double rate) { return 2.0 * (rate + 1.0); }

double gauge_time_to_go(const FlowTrajectory& traj, const FlowSnapshot& snap, const Gauge& gauge) {
  return snap.time_to_go + (gauge.T - traj.T_hat);
}

Gauge estimated_gauge(const FlowTrajectory& traj) { return {traj.T_hat, traj.x0_hat}; }

GraphTrajectory build_graph_trajectory(const FlowTrajectory& traj, const SphereGrid& grid,
                                       const Gauge& gauge) {
  GraphTrajectory out;
  out.gauge = gauge;
  for (const auto& snap : traj.snapshots) {
    const double ttg = gauge_time_to_go(traj, snap, gauge);
    if (!(ttg > 0.0)) continue;  // at or past the gauge extinction time
    const auto boundary = rescale_snapshot(snap.shape, ttg, gauge.x0);
    try {
      auto graph = extract_graph(boundary, grid);
      if (!out.first_valid_s) out.first_valid_s = graph.s;
      out.l0_track.push_back({graph.s, graph.coeffs[0]});
      if (graph.coeffs.l_max() >= 1) out.l1_track.push_back({graph.s, graph.coeffs[1]});
      out.snapshots.push_back(std::move(graph));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_star_shaped && e.code() != ErrorCode::graph_condition) throw;
      out.omitted_s.push_back(boundary.s);
    }
  }
  return out;
}

}  // namespace mcflab
