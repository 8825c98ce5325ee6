#include "mcflab/convex_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mcflab/sphere_spectral.hpp"

namespace mcflab {

using std::numbers::pi;

namespace {

// Stability interval of classical RK4 on the negative real axis.
constexpr double kRk4RealStability = 2.785;

std::string tau_context(double tau) {
  std::ostringstream os;
  os.precision(17);
  os << " at tau = " << tau;
  return os.str();
}

std::vector<double> flow_speed(std::span<const double> h, double tau) {
  const auto d = angular_derivatives(h);
  std::vector<double> out(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double rho = h[j] + d.second[j];
    if (!(rho > 0.0)) {
      std::ostringstream os;
      os << "convexity lost: h + h'' = " << rho << " at theta = "
         << 2.0 * pi * static_cast<double>(j) / static_cast<double>(h.size())
         << tau_context(tau);
      throw Error(ErrorCode::convexity_loss, os.str());
    }
    out[j] = -1.0 / rho;
  }
  return out;
}

FlowSnapshot make_snapshot(const SupportFunction& sf) {
  FlowSnapshot snap;
  snap.shape = sf;
  snap.area = enclosed_area(sf);
  snap.length = perimeter(sf);
  snap.time_to_go = snap.area / (2.0 * pi);
  return snap;
}

}  // namespace

double SupportFunction::angle(int j) const { return 2.0 * pi * j / nodes(); }

SupportFunction circle_support(int m, double radius, Vec2 center) {
  if (m < 8) throw Error(ErrorCode::invalid_input, "support grid needs at least 8 nodes");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_input, "radius must be positive");
  SupportFunction sf;
  sf.h.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * pi * j / m;
    sf.h[j] = radius + center[0] * std::cos(t) + center[1] * std::sin(t);
  }
  return sf;
}

SupportFunction ellipse_support(int m, double a, double b, Vec2 center) {
  if (m < 8) throw Error(ErrorCode::invalid_input, "support grid needs at least 8 nodes");
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::invalid_input, "semi-axes must be positive");
  SupportFunction sf;
  sf.h.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * pi * j / m;
    const double c = std::cos(t);
    const double s = std::sin(t);
    sf.h[j] = std::sqrt(a * a * c * c + b * b * s * s) + center[0] * c + center[1] * s;
  }
  return sf;
}

SupportFunction perturbed_circle_support(int m, const PerturbationSpec& spec) {
  if (spec.modes < 2) throw Error(ErrorCode::invalid_input, "perturbation needs modes >= 2");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Vec2 center{spec.shift * unit(rng), spec.shift * unit(rng)};
  SupportFunction sf = circle_support(m, 1.0, center);
  for (int l = 2; l <= spec.modes; ++l) {
    const double a = spec.amplitude * unit(rng) / (l * l);
    const double b = spec.amplitude * unit(rng) / (l * l);
    for (int j = 0; j < m; ++j) {
      const double t = 2.0 * pi * j / m;
      sf.h[j] += a * std::cos(l * t) + b * std::sin(l * t);
    }
  }
  const auto radius = curvature_radius(sf);
  if (*std::min_element(radius.begin(), radius.end()) <= 0.0) {
    throw Error(ErrorCode::invalid_input, "perturbation is not convex; lower the amplitude");
  }
  return sf;
}

std::vector<double> curvature_radius(const SupportFunction& sf) {
  const auto d = angular_derivatives(sf.h);
  std::vector<double> out(sf.h.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = sf.h[j] + d.second[j];
  return out;
}

std::vector<double> curvature_from_support(const SupportFunction& sf) {
  auto speed = flow_speed(sf.h, sf.tau);
  for (auto& v : speed) v = -v;
  return speed;
}

double enclosed_area(const SupportFunction& sf) {
  const auto d = angular_derivatives(sf.h);
  double sum = 0.0;
  for (std::size_t j = 0; j < sf.h.size(); ++j) {
    sum += sf.h[j] * sf.h[j] - d.first[j] * d.first[j];
  }
  return 0.5 * sum * 2.0 * pi / sf.nodes();
}

double perimeter(const SupportFunction& sf) {
  double sum = 0.0;
  for (double v : sf.h) sum += v;
  return sum * 2.0 * pi / sf.nodes();
}

Vec2 steiner_point(const SupportFunction& sf) {
  Vec2 out{0.0, 0.0};
  for (int j = 0; j < sf.nodes(); ++j) {
    const double t = sf.angle(j);
    out[0] += sf.h[j] * std::cos(t);
    out[1] += sf.h[j] * std::sin(t);
  }
  const double w = 2.0 / sf.nodes();
  return {out[0] * w, out[1] * w};
}

std::vector<Vec2> boundary_points(const SupportFunction& sf) {
  const auto d = angular_derivatives(sf.h);
  std::vector<Vec2> out(sf.h.size());
  for (int j = 0; j < sf.nodes(); ++j) {
    const double c = std::cos(sf.angle(j));
    const double s = std::sin(sf.angle(j));
    out[j] = {sf.h[j] * c - d.first[j] * s, sf.h[j] * s + d.first[j] * c};
  }
  return out;
}

double stable_time_step(const SupportFunction& sf) {
  const auto radius = curvature_radius(sf);
  const double rho_min = *std::min_element(radius.begin(), radius.end());
  if (!(rho_min > 0.0)) {
    throw Error(ErrorCode::convexity_loss, "shape is not strictly convex" + tau_context(sf.tau));
  }
  const double k_max = sf.nodes() / 2;
  return kRk4RealStability * rho_min * rho_min / (k_max * k_max - 1.0);
}

SupportFunction step_flow(const SupportFunction& sf, double dtau) {
  if (!(dtau > 0.0)) throw Error(ErrorCode::step_rejected, "time step must be positive");
  if (dtau > stable_time_step(sf) * (1.0 + 1e-12)) {
    throw Error(ErrorCode::step_rejected,
                "time step exceeds the RK4 stability bound" + tau_context(sf.tau));
  }
  const std::size_t m = sf.h.size();
  std::vector<double> stage(m);
  auto shifted = [&](const std::vector<double>& k, double f) {
    for (std::size_t j = 0; j < m; ++j) stage[j] = sf.h[j] + f * k[j];
    return std::span<const double>(stage);
  };
  const auto k1 = flow_speed(sf.h, sf.tau);
  const auto k2 = flow_speed(shifted(k1, 0.5 * dtau), sf.tau + 0.5 * dtau);
  const auto k3 = flow_speed(shifted(k2, 0.5 * dtau), sf.tau + 0.5 * dtau);
  const auto k4 = flow_speed(shifted(k3, dtau), sf.tau + dtau);
  SupportFunction out;
  out.h.resize(m);
  out.tau = sf.tau + dtau;
  for (std::size_t j = 0; j < m; ++j) {
    out.h[j] = sf.h[j] + dtau / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return out;
}

FlowTrajectory run_to_extinction(const SupportFunction& initial, const FlowControls& controls) {
  if (!(controls.cfl > 0.0 && controls.cfl <= 1.0)) {
    throw Error(ErrorCode::invalid_input, "cfl must lie in (0, 1]");
  }
  if (!(controls.area_floor > 0.0 && controls.area_floor < 1.0)) {
    throw Error(ErrorCode::invalid_input, "area floor must lie in (0, 1)");
  }
  if (!(controls.snapshot_ds > 0.0)) {
    throw Error(ErrorCode::invalid_input, "snapshot spacing must be positive");
  }
  stable_time_step(initial);  // rejects non-convex input

  FlowTrajectory traj;
  traj.controls = controls;
  SupportFunction current = initial;
  double tau_lo = 0.0;
  const double area0 = enclosed_area(current);
  const double floor = controls.area_floor * area0;

  // Snapshot k sits at s = k * ds, i.e. at remaining time exp(-k ds).
  const double s_initial = -std::log(area0 / (2.0 * pi));
  auto k = static_cast<std::int64_t>(std::ceil(s_initial / controls.snapshot_ds - 1e-9));
  if (std::abs(k * controls.snapshot_ds - s_initial) < 1e-9) {
    traj.snapshots.push_back(make_snapshot(current));
    ++k;
  }

  while (true) {
    const double area = enclosed_area(current);
    if (area < floor) break;
    if (traj.steps >= controls.max_steps) {
      throw Error(ErrorCode::step_underflow,
                  "step budget exhausted before extinction" + tau_context(current.tau));
    }
    double dt = controls.cfl * stable_time_step(current);
    const double s_next = k * controls.snapshot_ds;
    bool landing = false;
    if (s_next <= controls.max_s) {
      const double gap = area / (2.0 * pi) - std::exp(-s_next);
      if (gap <= 0.0) {
        traj.snapshots.push_back(make_snapshot(current));
        ++k;
        continue;
      }
      if (gap <= dt) {
        dt = gap;
        landing = true;
      }
    }
    if (!(dt > std::numeric_limits<double>::min()) ||
        dt < 1e-15 * std::max(current.tau, area / (2.0 * pi))) {
      throw Error(ErrorCode::step_underflow, "time step underflow" + tau_context(current.tau));
    }
    // Compensated sum keeps tau accurate to an ulp over ~1e5 steps.
    const double tau_hi = current.tau;
    current = step_flow(current, dt);
    const double sum = tau_hi + dt;
    tau_lo += (tau_hi - sum) + dt;
    current.tau = sum + tau_lo;
    tau_lo -= current.tau - sum;
    ++traj.steps;
    if (landing) {
      traj.snapshots.push_back(make_snapshot(current));
      ++k;
    }
  }
  traj.final_state = make_snapshot(current);
  const auto est = extinction_estimates(traj);
  traj.T_hat = est.T;
  traj.x0_hat = est.x0;
  traj.x0_converged = est.converged;
  return traj;
}

ExtinctionEstimate extinction_estimates(const FlowTrajectory& traj) {
  const FlowSnapshot& last = traj.final_state;
  if (last.shape.h.empty()) {
    throw Error(ErrorCode::invalid_input, "trajectory has no final state");
  }
  ExtinctionEstimate est;
  est.T = last.shape.tau + last.area / (2.0 * pi);

  // Late window: the last four units of s, final state included.
  std::vector<const FlowSnapshot*> window;
  const double s_last = -std::log(last.time_to_go);
  for (const auto& snap : traj.snapshots) {
    if (-std::log(snap.time_to_go) >= s_last - 4.0) window.push_back(&snap);
  }
  window.push_back(&last);

  std::vector<Vec2> steiner;
  for (const auto* snap : window) steiner.push_back(steiner_point(snap->shape));

  // The l = 1 coefficient of the rescaled shape is (S - x0) exp(s/2); its
  // exp(s/2) amplitude is the weighted mean of S - x0 with weights 1/(T - tau).
  est.x0 = steiner.back();
  constexpr int kMaxIterations = 20;
  for (int it = 1; it <= kMaxIterations; ++it) {
    Vec2 num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
      const double w = 1.0 / window[i]->time_to_go;
      num[0] += w * (steiner[i][0] - est.x0[0]);
      num[1] += w * (steiner[i][1] - est.x0[1]);
      den += w;
    }
    const Vec2 alpha{num[0] / den, num[1] / den};
    est.x0[0] += alpha[0];
    est.x0[1] += alpha[1];
    est.iterations = it;
    est.last_correction = norm(alpha);
    if (est.last_correction <= 1e-13 * (1.0 + norm(est.x0))) {
      est.converged = true;
      break;
    }
  }
  return est;
}

}  // namespace mcflab
