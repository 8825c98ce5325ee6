#include "mcflab/levelset_arrival.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mcflab/sphere_spectral.hpp"

namespace mcflab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Godunov update for |grad d| = 1 from the smaller neighbors in x and y.
double eikonal_update(double a, double b, double h) {
  if (std::abs(a - b) >= h) return std::min(a, b) + h;
  return 0.5 * (a + b + std::sqrt(2.0 * h * h - (a - b) * (a - b)));
}

// Rebuilds phi as a signed distance: nodes next to a sign change get
// phi / |grad phi|, the rest come from fast sweeping.
void reinitialize(const CartesianGrid& g, std::vector<double>& phi) {
  const int nx = g.nx;
  const int ny = g.ny;
  const double h = g.dx;
  std::vector<double> d(phi.size(), kInf);
  std::vector<std::uint8_t> fixed(phi.size(), 0);
  auto at = [&](int i, int j) { return phi[g.index(std::clamp(i, 0, nx - 1), std::clamp(j, 0, ny - 1))]; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double p = at(i, j);
      const bool interface = p == 0.0 || p * at(i + 1, j) < 0.0 || p * at(i - 1, j) < 0.0 ||
                             p * at(i, j + 1) < 0.0 || p * at(i, j - 1) < 0.0;
      if (!interface) continue;
      const double gx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      const double gy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
      const double grad = std::sqrt(gx * gx + gy * gy);
      const std::size_t k = g.index(i, j);
      d[k] = grad > 1e-12 ? std::abs(p) / grad : std::abs(p);
      fixed[k] = 1;
    }
  }
  auto relax = [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    if (fixed[k]) return;
    const double a = std::min(i > 0 ? d[g.index(i - 1, j)] : kInf, i < nx - 1 ? d[g.index(i + 1, j)] : kInf);
    const double b = std::min(j > 0 ? d[g.index(i, j - 1)] : kInf, j < ny - 1 ? d[g.index(i, j + 1)] : kInf);
    if (a == kInf && b == kInf) return;
    double cand;
    if (a == kInf) cand = b + h;
    else if (b == kInf) cand = a + h;
    else cand = eikonal_update(a, b, h);
    d[k] = std::min(d[k], cand);
  };
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int j = 0; j < ny; ++j) for (int i = 0; i < nx; ++i) relax(i, j);
    for (int j = 0; j < ny; ++j) for (int i = nx - 1; i >= 0; --i) relax(i, j);
    for (int j = ny - 1; j >= 0; --j) for (int i = nx - 1; i >= 0; --i) relax(i, j);
    for (int j = ny - 1; j >= 0; --j) for (int i = 0; i < nx; ++i) relax(i, j);
  }
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (d[k] == kInf) continue;
    phi[k] = phi[k] < 0.0 ? -d[k] : d[k];
  }
}

// Worst | |grad phi| - 1 | over nodes next to a sign change.
double front_gradient_drift(const CartesianGrid& g, const std::vector<double>& phi) {
  double worst = 0.0;
  for (int j = 1; j < g.ny - 1; ++j) {
    for (int i = 1; i < g.nx - 1; ++i) {
      const double p = phi[g.index(i, j)];
      const double e = phi[g.index(i + 1, j)];
      const double n = phi[g.index(i, j + 1)];
      if (p * e >= 0.0 && p * n >= 0.0) continue;
      const double gx = (e - phi[g.index(i - 1, j)]) / (2.0 * g.dx);
      const double gy = (n - phi[g.index(i, j - 1)]) / (2.0 * g.dx);
      worst = std::max(worst, std::abs(std::sqrt(gx * gx + gy * gy) - 1.0));
    }
  }
  return worst;
}

// Stationary point of a quadratic fitted to (x, t) samples.
Vec2 paraboloid_vertex(const std::vector<Vec2>& x, const std::vector<double>& t, Vec2 fallback) {
  if (x.size() < 6) return fallback;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 6);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = x[k][0] - fallback[0];
    const double v = x[k][1] - fallback[1];
    a.row(static_cast<Eigen::Index>(k)) << 1.0, u, v, u * u, u * v, v * v;
    rhs(static_cast<Eigen::Index>(k)) = t[k];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix2d hess;
  hess << 2.0 * c(3), c(4), c(4), 2.0 * c(5);
  if (std::abs(hess.determinant()) < 1e-14) return fallback;
  const Eigen::Vector2d off = hess.fullPivLu().solve(Eigen::Vector2d(-c(1), -c(2)));
  return {fallback[0] + off(0), fallback[1] + off(1)};
}

void finish_estimates(ArrivalField& field) {
  const auto& g = field.grid;
  double best = -kInf;
  Vec2 arg{0.0, 0.0};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = field.at(i, j);
      if (std::isfinite(v) && v > best) {
        best = v;
        arg = g.node(i, j);
      }
    }
  }
  if (!std::isfinite(best)) return;
  field.T_hat = best;
  std::vector<Vec2> xs;
  std::vector<double> ts;
  const double radius = 6.0 * g.dx;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = field.at(i, j);
      const Vec2 p = g.node(i, j);
      if (std::isfinite(v) && norm({p[0] - arg[0], p[1] - arg[1]}) <= radius) {
        xs.push_back(p);
        ts.push_back(v);
      }
    }
  }
  field.x0_hat = paraboloid_vertex(xs, ts, arg);
  if (norm({field.x0_hat[0] - arg[0], field.x0_hat[1] - arg[1]}) > g.dx) field.x0_hat = arg;
}

// Distance from (y0, y1), both >= 0, to the ellipse with semi-axes e0 >= e1,
// by bisection on the Lagrange multiplier (Eberly).
double ellipse_distance(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double n0 = r0 * z0;
      double s0 = z1 - 1.0;
      double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
      double sbar = 0.0;
      for (int it = 0; it < 2100; ++it) {
        sbar = 0.5 * (s0 + s1);
        if (sbar == s0 || sbar == s1) break;
        const double q0 = n0 / (sbar + r0);
        const double q1 = z1 / (sbar + 1.0);
        g = q0 * q0 + q1 * q1 - 1.0;
        if (g > 0.0) {
          s0 = sbar;
        } else if (g < 0.0) {
          s1 = sbar;
        } else {
          break;
        }
      }
      const double x0 = r0 * y0 / (sbar + r0);
      const double x1 = y1 / (sbar + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer = e0 * y0;
  const double denom = e0 * e0 - e1 * e1;
  if (numer < denom) {
    const double xd = numer / denom;
    return std::hypot(e0 * xd - y0, e1 * std::sqrt(1.0 - xd * xd));
  }
  return std::abs(y0 - e0);
}

}  // namespace

CartesianGrid square_grid(int nodes, Vec2 center, double half_width) {
  if (nodes < 2 || !(half_width > 0.0)) {
    throw Error(ErrorCode::invalid_input, "grid needs >= 2 nodes and a positive half-width");
  }
  CartesianGrid g;
  g.nx = nodes;
  g.ny = nodes;
  g.dx = 2.0 * half_width / (nodes - 1);
  g.origin = {center[0] - half_width, center[1] - half_width};
  return g;
}

LevelSetGrid disk_domain(const CartesianGrid& grid, double radius, Vec2 center) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_input, "radius must be positive");
  LevelSetGrid out{grid, std::vector<double>(grid.size())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      out.phi[grid.index(i, j)] = norm({p[0] - center[0], p[1] - center[1]}) - radius;
    }
  }
  return out;
}

LevelSetGrid ellipse_domain(const CartesianGrid& grid, double a, double b, Vec2 center) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::invalid_input, "semi-axes must be positive");
  LevelSetGrid out{grid, std::vector<double>(grid.size())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const double x = std::abs(p[0] - center[0]);
      const double y = std::abs(p[1] - center[1]);
      const double dist = a >= b ? ellipse_distance(a, b, x, y) : ellipse_distance(b, a, y, x);
      const double level = (x / a) * (x / a) + (y / b) * (y / b) - 1.0;
      out.phi[grid.index(i, j)] = level < 0.0 ? -dist : dist;
    }
  }
  return out;
}

LevelSetGrid box_domain(const CartesianGrid& grid, double hx, double hy, Vec2 center) {
  if (!(hx > 0.0 && hy > 0.0)) throw Error(ErrorCode::invalid_input, "box half-widths must be positive");
  LevelSetGrid out{grid, std::vector<double>(grid.size())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const double qx = std::abs(p[0] - center[0]) - hx;
      const double qy = std::abs(p[1] - center[1]) - hy;
      const double outside = norm({std::max(qx, 0.0), std::max(qy, 0.0)});
      out.phi[grid.index(i, j)] = outside + std::min(std::max(qx, qy), 0.0);
    }
  }
  return out;
}

double ball_arrival_exact(std::span<const double> x, double r, std::span<const double> x0, int n) {
  if (x.size() != x0.size() || n < 1 || !(r > 0.0)) {
    throw Error(ErrorCode::invalid_input, "ball arrival needs matching dimensions, n >= 1, r > 0");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - x0[i]) * (x[i] - x0[i]);
  if (d2 > r * r * (1.0 + 1e-14)) {
    std::ostringstream os;
    os << "point at distance " << std::sqrt(d2) << " lies outside the ball of radius " << r;
    throw Error(ErrorCode::domain, os.str());
  }
  return std::max(0.0, (r * r - d2) / (2.0 * n));
}

ArrivalField solve_arrival(const LevelSetGrid& domain, const ArrivalControls& controls) {
  const CartesianGrid& g = domain.grid;
  if (domain.phi.size() != g.size() || g.nx < 3 || g.ny < 3) {
    throw Error(ErrorCode::invalid_input, "level set samples do not match the grid");
  }
  if (!(controls.dt_factor > 0.0) || controls.dt_factor > 0.25) {
    throw Error(ErrorCode::step_rejected, "dt_factor must lie in (0, 1/4] for the curvature stencil");
  }
  std::size_t inside = 0;
  int min_i = g.nx, max_i = -1;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (domain.phi[g.index(i, j)] < 0.0) {
        ++inside;
        min_i = std::min(min_i, i);
        max_i = std::max(max_i, i);
      }
    }
  }
  if (inside == 0 || max_i - min_i < 64) {
    throw Error(ErrorCode::invalid_input, "domain must be resolved by at least 64 cells across");
  }

  ArrivalField field;
  field.grid = g;
  field.values.assign(g.size(), kNaN);
  field.flags.assign(g.size(), 0);
  std::vector<double> phi = domain.phi;
  std::vector<double> next(phi.size());
  std::size_t pending = 0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (phi[k] == 0.0) field.values[k] = 0.0;
    else if (phi[k] < 0.0) ++pending;
  }

  const double h = g.dx;
  const double dt = controls.dt_factor * h * h;
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  double extent = 0.0;
  for (double v : phi) extent = std::max(extent, -v);
  const std::int64_t max_steps = controls.max_steps > 0
                                     ? controls.max_steps
                                     : static_cast<std::int64_t>(2.0 * extent * extent / dt) + 1000;
  const double unresolved_area = std::numbers::pi * 4.0 * h * h;
  double tau = 0.0;
  bool flagging = false;

  while (pending > 0) {
    if (field.steps >= max_steps) {
      throw Error(ErrorCode::step_underflow, "level set did not reach extinction in the step budget");
    }
    for (int j = 0; j < g.ny; ++j) {
      const int jm = j > 0 ? j - 1 : 1;          // mirror: Neumann at the grid edge
      const int jp = j < g.ny - 1 ? j + 1 : g.ny - 2;
      for (int i = 0; i < g.nx; ++i) {
        const int im = i > 0 ? i - 1 : 1;
        const int ip = i < g.nx - 1 ? i + 1 : g.nx - 2;
        const double c = phi[g.index(i, j)];
        const double e = phi[g.index(ip, j)];
        const double w = phi[g.index(im, j)];
        const double n = phi[g.index(i, jp)];
        const double s = phi[g.index(i, jm)];
        const double px = (e - w) * inv2h;
        const double py = (n - s) * inv2h;
        const double pxx = (e - 2.0 * c + w) * invh2;
        const double pyy = (n - 2.0 * c + s) * invh2;
        const double pxy = (phi[g.index(ip, jp)] - phi[g.index(im, jp)] - phi[g.index(ip, jm)] +
                            phi[g.index(im, jm)]) * inv4h2;
        // Where the gradient vanishes the operator falls back to half the Laplacian.
        const double speed = (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px +
                              0.5 * controls.eps * (pxx + pyy)) /
                             (px * px + py * py + controls.eps);
        next[g.index(i, j)] = c + dt * speed;
      }
    }
    std::size_t remaining = 0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      if (std::isnan(field.values[k]) && domain.phi[k] < 0.0) {
        if (next[k] >= 0.0) {
          const double frac = phi[k] / (phi[k] - next[k]);
          field.values[k] = tau + dt * std::clamp(frac, 0.0, 1.0);
          field.flags[k] = flagging ? 1 : 0;
          --pending;
        }
      }
      if (next[k] < 0.0) ++remaining;
    }
    phi.swap(next);
    tau += dt;
    ++field.steps;
    if (!flagging && static_cast<double>(remaining) * h * h < unresolved_area) {
      flagging = true;
      field.truncated = true;
    }
    if (controls.reinit_every > 0 && field.steps % controls.reinit_every == 0 &&
        front_gradient_drift(g, phi) > controls.reinit_drift) {
      reinitialize(g, phi);
      ++field.reinitializations;
    }
  }
  finish_estimates(field);
  return field;
}

ArrivalField arrival_from_trajectory(const SupportFunction& initial, const FlowTrajectory& traj,
                                     const CartesianGrid& grid) {
  std::vector<const SupportFunction*> states{&initial};
  for (const auto& snap : traj.snapshots) {
    if (snap.shape.tau > states.back()->tau) states.push_back(&snap.shape);
  }
  if (traj.final_state.shape.tau > states.back()->tau) states.push_back(&traj.final_state.shape);
  std::vector<TrigInterpolant> interp;
  interp.reserve(states.size());
  for (const auto* s : states) interp.emplace_back(s->h);

  // g(x, state) = min over theta of h - x . e_theta, with the minimizer.
  struct Gap {
    double value;
    double rate;  // d g / d tau = -kappa at the minimizer
  };
  auto gap = [&](std::size_t k, Vec2 x) {
    const auto& h = states[k]->h;
    const int m = static_cast<int>(h.size());
    int best = 0;
    double best_v = kInf;
    for (int j = 0; j < m; ++j) {
      const double t = 2.0 * std::numbers::pi * j / m;
      const double v = h[j] - x[0] * std::cos(t) - x[1] * std::sin(t);
      if (v < best_v) {
        best_v = v;
        best = j;
      }
    }
    double theta = 2.0 * std::numbers::pi * best / m;
    TrigInterpolant::Jet jet{};
    for (int it = 0; it < 20; ++it) {
      jet = interp[k].evaluate(theta);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const double d1 = jet.first + x[0] * s - x[1] * c;
      const double d2 = jet.second + x[0] * c + x[1] * s;
      if (!(d2 > 0.0)) break;
      const double step = std::clamp(d1 / d2, -0.1, 0.1);
      theta -= step;
      if (std::abs(step) < 1e-14) break;
    }
    jet = interp[k].evaluate(theta);
    const double value = jet.value - x[0] * std::cos(theta) - x[1] * std::sin(theta);
    return Gap{value, -1.0 / (jet.value + jet.second)};
  };

  ArrivalField field;
  field.grid = grid;
  field.values.assign(grid.size(), kNaN);
  field.flags.assign(grid.size(), 0);
  const std::size_t last = states.size() - 1;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = grid.node(i, j);
      const Gap g0 = gap(0, x);
      if (g0.value < 0.0) continue;
      if (gap(last, x).value > 0.0) continue;
      std::size_t lo = 0, hi = last;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (gap(mid, x).value > 0.0) lo = mid;
        else hi = mid;
      }
      const Gap a = gap(lo, x);
      const Gap b = gap(hi, x);
      const double ta = states[lo]->tau;
      const double dt = states[hi]->tau - ta;
      auto hermite = [&](double u) {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * a.value + (u3 - 2 * u2 + u) * dt * a.rate +
               (-2 * u3 + 3 * u2) * b.value + (u3 - u2) * dt * b.rate;
      };
      double ul = 0.0, uh = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double um = 0.5 * (ul + uh);
        if (hermite(um) > 0.0) ul = um;
        else uh = um;
      }
      field.values[grid.index(i, j)] = ta + dt * 0.5 * (ul + uh);
    }
  }
  finish_estimates(field);
  return field;
}

ResidualReport asymptotic_residual(const ArrivalField& field, double T, Vec2 x0, int order,
                                   double floor, double r_min) {
  if (order < 3) throw Error(ErrorCode::invalid_input, "expansion order must be at least 3");
  const auto& g = field.grid;
  ResidualReport rep;
  rep.order = order;
  rep.floor = floor;
  if (!(r_min > 0.0)) r_min = 4.0 * g.dx;
  // Largest radius whose disk stays inside the grid.
  const double reach = std::min({x0[0] - g.origin[0], g.origin[0] + g.dx * (g.nx - 1) - x0[0],
                                 x0[1] - g.origin[1], g.origin[1] + g.dx * (g.ny - 1) - x0[1]});
  for (double r = r_min; 2.0 * r <= reach + 1e-12; r *= 2.0) {
    AnnulusResidual ann;
    ann.inner_radius = r;
    bool complete = true;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const Vec2 p = g.node(i, j);
        const double d = norm({p[0] - x0[0], p[1] - x0[1]});
        if (d < r || d >= 2.0 * r) continue;
        const double t = field.at(i, j);
        if (!std::isfinite(t)) {
          complete = false;
          continue;
        }
        ann.amplitude = std::max(ann.amplitude, std::abs(t - T + 0.5 * d * d));
        ++ann.samples;
      }
    }
    ann.resolved = complete && ann.samples > 0 && ann.amplitude > floor;
    rep.annuli.push_back(ann);
  }
  std::vector<double> lx, ly;
  bool any_above = false;
  for (std::size_t k = 0; k < rep.annuli.size(); ++k) {
    const auto& ann = rep.annuli[k];
    any_above = any_above || ann.amplitude > floor;
    if (!ann.resolved) {
      rep.partial = true;
      continue;
    }
    lx.push_back(std::log(ann.inner_radius));
    ly.push_back(std::log(ann.amplitude));
    if (k > 0 && rep.annuli[k - 1].resolved) {
      rep.exponents.push_back(
          {ann.inner_radius, std::log2(ann.amplitude / rep.annuli[k - 1].amplitude)});
    }
  }
  rep.at_floor = !rep.annuli.empty() && !any_above;
  rep.fitted_exponent = kNaN;
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k] / n;
      my += ly[k] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ly[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    rep.fitted_exponent = sxy / sxx;
  }
  return rep;
}

double ball_error(const ArrivalField& field, double r, Vec2 x0, double collar) {
  const auto& g = field.grid;
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = field.at(i, j);
      if (!std::isfinite(t)) continue;
      const Vec2 p = g.node(i, j);
      const double d = norm({p[0] - x0[0], p[1] - x0[1]});
      if (d < collar || d > r) continue;
      err = std::max(err, std::abs(t - (r * r - d * d) / 2.0));
    }
  }
  return err;
}

}  // namespace mcflab
