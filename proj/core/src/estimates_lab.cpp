#include "mcflab/estimates_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace mcflab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double trapezoid(std::span<const double> x, std::span<const double> f) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return sum;
}

std::vector<double> norms_of(const GraphTrajectory& traj, int r) {
  std::vector<double> out;
  out.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) out.push_back(sobolev_norm(snap.coeffs, r));
  return out;
}

std::vector<double> s_values(const GraphTrajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) out.push_back(snap.s);
  return out;
}

std::size_t first_index_at_or_after(const GraphTrajectory& traj, double s) {
  std::size_t i = 0;
  while (i < traj.snapshots.size() && traj.snapshots[i].s < s - 1e-9) ++i;
  return i;
}

std::size_t nearest_index(const GraphTrajectory& traj, double s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    if (std::abs(traj.snapshots[i].s - s) < std::abs(traj.snapshots[best].s - s)) best = i;
  }
  return best;
}

double lambda_of_index(int k) { return linearized_eigenvalue(1, k - 1); }

}  // namespace

std::vector<double> rmcf_rhs(const GraphSnapshot& u) {
  const double radius = u.grid.radius();
  const auto d = angular_derivatives(u.u);
  std::vector<double> out(u.u.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double rho = radius + u.u[j];
    if (!(rho > 0.0)) {
      std::ostringstream os;
      os << "graph condition violated at node " << j << " (s = " << u.s << ")";
      throw Error(ErrorCode::graph_condition, os.str());
    }
    const double r1 = d.first[j];
    const double r2 = d.second[j];
    const double w2 = rho * rho + r1 * r1;
    const double w = std::sqrt(w2);
    const double kappa = (rho * rho + 2.0 * r1 * r1 - rho * r2) / (w2 * w);
    const double normal_speed = -kappa + rho * rho / (2.0 * w);
    out[j] = normal_speed * w / rho;
  }
  return out;
}

std::vector<double> linear_part(const GraphSnapshot& u) {
  const double r2 = u.grid.radius() * u.grid.radius();
  const auto d = angular_derivatives(u.u);
  std::vector<double> out(u.u.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = d.second[j] / r2 + u.u[j];
  return out;
}

NonlinearRemainder nonlinear_remainder(const GraphSnapshot& u, int r_max) {
  auto rhs = rmcf_rhs(u);
  const auto lin = linear_part(u);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] -= lin[j];
  NonlinearRemainder out;
  out.s = u.s;
  out.coeffs = analyze(rhs, u.grid);
  for (int r = 0; r <= r_max; ++r) out.norms[r] = sobolev_norm(out.coeffs, r);
  return out;
}

std::vector<GraphSnapshot> random_graph_samples(std::uint64_t seed, int count,
                                                const SphereGrid& grid, int l_max, int r,
                                                double max_norm) {
  if (count < 0) throw Error(ErrorCode::invalid_input, "sample count must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> level(0.1, 1.0);
  std::vector<GraphSnapshot> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SpectralCoeffs c(grid.dimension(), l_max);
    for (int l = 0; l <= l_max; ++l) {
      const double sd = std::pow(1.0 + l, -3.0);
      c[l].cos_part = sd * gauss(rng);
      if (l > 0) c[l].sin_part = sd * gauss(rng);
    }
    const double target = level(rng) * max_norm;
    const double current = sobolev_norm(c, r);
    if (current > 0.0) c *= target / current;
    out.push_back(make_graph_snapshot(0.0, grid, c));
  }
  return out;
}

QuadraticBoundResult check_quadratic_bound(std::span<const GraphSnapshot> samples, int r) {
  QuadraticBoundResult out;
  auto& rep = out.report;
  rep.check = "quadratic_bound";
  rep.params = {{"r", static_cast<double>(r)}, {"samples", static_cast<double>(samples.size())}};
  rep.tolerance = 1e-12;
  if (!samples.empty() && r <= samples.front().grid.dimension() / 2.0 + 1.0) {
    throw Error(ErrorCode::invalid_input, "the quadratic bound needs r > n/2 + 1");
  }
  std::vector<double> digest_data;
  out.min_chain_slack = std::numeric_limits<double>::infinity();
  const std::size_t half = (samples.size() + 1) / 2;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& u = samples[i];
    const double nr = sobolev_norm(u.coeffs, r);
    digest_data.push_back(nr);
    if (nr > 1.0) {
      ++out.excluded;
      continue;
    }
    const double n1 = sobolev_norm(u.coeffs, r + 1);
    const double n2 = sobolev_norm(u.coeffs, r + 2);
    const double n4 = sobolev_norm(u.coeffs, r + 4);
    const double nn = nonlinear_remainder(u, r).norms.at(r);
    const double ratio = (n1 * n2 > 0.0) ? nn / (n1 * n2) : 0.0;
    out.c_hat = std::max(out.c_hat, ratio);
    if (i < half) out.c_half = std::max(out.c_half, ratio);
    // Chain: n1 n2 <= n2^2 <= nr n4, written as relative slacks.
    const double scale = std::max(n2 * n2, std::numeric_limits<double>::min());
    const double slack1 = (n2 * n2 - n1 * n2) / scale;
    const double slack2 = (nr * n4 - n2 * n2) / scale;
    rep.margins.push_back(slack1);
    rep.margins.push_back(slack2);
    out.min_chain_slack = std::min({out.min_chain_slack, slack1, slack2});
  }
  rep.inputs_digest = sha256_hex(digest_data);
  if (rep.margins.empty()) {
    out.min_chain_slack = 0.0;
    rep.verdict = samples.empty() ? Verdict::pass : Verdict::inconclusive;
    rep.note = samples.empty() ? "no samples" : "every sample violated ||u||_r <= 1";
  } else {
    const bool finite = std::isfinite(out.c_hat);
    const bool stable = out.c_half == 0.0 ? out.c_hat == 0.0 : out.c_hat <= 2.0 * out.c_half;
    rep.verdict = verdict_from_margins(rep.margins, rep.tolerance);
    if (rep.verdict == Verdict::pass && !(finite && stable)) {
      rep.verdict = Verdict::fail;
      rep.note = "empirical constant unstable under sample doubling";
    }
  }
  rep.metrics = {{"c_hat", out.c_hat},
                 {"c_half", out.c_half},
                 {"min_chain_slack", out.min_chain_slack},
                 {"excluded", static_cast<double>(out.excluded)}};
  return out;
}

double remainder_scaling_order(const GraphSnapshot& u, std::span<const double> eps, int r) {
  if (eps.size() < 2) throw Error(ErrorCode::invalid_input, "need at least two eps values");
  std::vector<double> x;
  std::vector<double> y;
  for (double e : eps) {
    auto scaled = u.coeffs;
    scaled *= e;
    const auto snap = make_graph_snapshot(u.s, u.grid, scaled);
    x.push_back(std::log(e));
    y.push_back(std::log(nonlinear_remainder(snap, r).norms.at(r)));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

DecayFit decay_fit(std::span<const double> s, std::span<const double> values, FitWindow window,
                   double floor, int min_samples) {
  DecayFit fit;
  fit.window = window;
  std::vector<double> xs;
  std::vector<double> ys;
  int in_window = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < window.begin - 1e-9 || s[i] > window.end + 1e-9) continue;
    ++in_window;
    if (values[i] > floor) {
      xs.push_back(s[i]);
      ys.push_back(std::log(values[i]));
    }
  }
  if (in_window < min_samples) {
    std::ostringstream os;
    os << "decay fit needs " << min_samples << " snapshots in [" << window.begin << ", "
       << window.end << "], found " << in_window;
    throw Error(ErrorCode::invalid_input, os.str());
  }
  fit.samples = static_cast<int>(xs.size());
  if (xs.empty()) {
    fit.at_floor = true;
    fit.rate = kNaN;
    fit.amplitude = 0.0;
    return fit;
  }
  if (xs.size() < 2) {
    fit.rate = kNaN;
    fit.residual = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(ys[i] - (intercept + slope * xs[i])));
  }
  // Points dropped at the floor make the fit partial.
  fit.reliable = fit.residual <= 0.1 && fit.samples == in_window;
  return fit;
}

DecayFit decay_fit(const GraphTrajectory& traj, int r, FitWindow window, double floor,
                   int min_samples) {
  const auto s = s_values(traj);
  const auto v = norms_of(traj, r);
  auto fit = decay_fit(s, v, window, floor, min_samples);
  fit.r = r;
  return fit;
}

std::vector<DecayFit> sliding_decay_fits(const GraphTrajectory& traj, int r, FitWindow range,
                                         double width, double stride, double floor,
                                         int min_samples) {
  if (!(width > 0.0 && stride > 0.0)) {
    throw Error(ErrorCode::invalid_input, "sliding window width and stride must be positive");
  }
  const auto s = s_values(traj);
  const auto v = norms_of(traj, r);
  std::vector<DecayFit> out;
  for (double b = range.begin; b + width <= range.end + 1e-9; b += stride) {
    try {
      auto fit = decay_fit(s, v, {b, b + width}, floor, min_samples);
      fit.r = r;
      out.push_back(fit);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_input) throw;
    }
  }
  return out;
}

bool admissible_tail_index(int k, double rate) {
  if (k < 1) return false;
  if (!(lambda_of_index(k) < 2.0 * rate)) return false;
  return k == 1 || lambda_of_index(k - 1) < rate;
}

VerificationReport verify_key_inequality(const GraphTrajectory& traj,
                                         const KeyInequalityOptions& options) {
  VerificationReport rep;
  rep.check = "key_inequality";
  rep.tolerance = options.tolerance;
  rep.inputs_digest = trajectory_digest(traj);
  const double lambda = lambda_of_index(options.k);
  const std::size_t i0 = first_index_at_or_after(traj, options.s0);
  const double s0 = i0 < traj.snapshots.size() ? traj.snapshots[i0].s : options.s0;
  rep.params = {{"k", static_cast<double>(options.k)},
                {"r", static_cast<double>(options.r)},
                {"s0", s0},
                {"horizon", options.horizon},
                {"decay_rate", options.decay_rate},
                {"lambda_k", lambda}};
  if (i0 + 1 >= traj.snapshots.size()) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "trajectory does not extend past s0";
    return rep;
  }
  const auto& u0 = traj.snapshots[i0].coeffs;
  const double projected = sobolev_norm(project_tail(u0, options.k), options.r);
  const double full = sobolev_norm(u0, options.r);
  rep.metrics = {{"projection_norm", projected},
                 {"full_norm", full},
                 {"projection_ratio", full > 0.0 ? projected / full : 0.0}};
  if (!admissible_tail_index(options.k, options.decay_rate)) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "divergent majorant: lambda_k is not below twice the decay rate "
               "(or lambda_{k-1} is not below it), the right side is infinite";
    return rep;
  }

  std::vector<double> t;
  std::vector<double> weighted_n;
  std::vector<double> weighted_major;
  std::vector<double> u_norm;
  for (std::size_t i = i0; i < traj.snapshots.size(); ++i) {
    const auto& snap = traj.snapshots[i];
    const double e = std::exp(lambda * (snap.s - s0));
    const double ur = sobolev_norm(snap.coeffs, options.r);
    t.push_back(snap.s);
    u_norm.push_back(ur);
    weighted_n.push_back(e * nonlinear_remainder(snap, options.r).norms.at(options.r));
    weighted_major.push_back(e * ur * sobolev_norm(snap.coeffs, options.r + 4));
  }
  const double gap = 2.0 * options.decay_rate - lambda;
  const double simulated = trapezoid(t, weighted_n);
  const double tail = weighted_n.back() / gap;
  const double rhs = projected + simulated + tail;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > s0 + options.horizon + 1e-9) break;
    rep.margins.push_back(rhs - std::exp(lambda * (t[i] - s0)) * u_norm[i]);
  }
  rep.verdict = verdict_from_margins(rep.margins, rep.tolerance);
  rep.metrics.emplace_back("integral_simulated", simulated);
  rep.metrics.emplace_back("integral_tail", tail);
  rep.metrics.emplace_back("rhs", rhs);
  if (options.c_hat > 0.0) {
    const double major = projected + options.c_hat *
                                         (trapezoid(t, weighted_major) + weighted_major.back() / gap);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size() && t[i] <= s0 + options.horizon + 1e-9; ++i) {
      worst = std::min(worst, major - std::exp(lambda * (t[i] - s0)) * u_norm[i]);
    }
    rep.metrics.emplace_back("majorant_min_margin", worst);
  }
  return rep;
}

SupBoundResult verify_sup_bound(const GraphTrajectory& traj, const SupBoundOptions& options) {
  SupBoundResult out;
  auto& rep = out.report;
  rep.check = "sup_bound";
  rep.tolerance = options.tolerance;
  rep.inputs_digest = trajectory_digest(traj);
  rep.params = {{"r", static_cast<double>(options.r)},
                {"c_hat", options.c_hat},
                {"decay_rate", options.decay_rate},
                {"floor", options.floor}};
  if (traj.snapshots.size() < 2) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "trajectory too short";
    return out;
  }
  const auto s = s_values(traj);
  auto ur = norms_of(traj, options.r);
  auto u4 = norms_of(traj, options.r + 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (ur[i] <= options.floor) ur[i] = 0.0;
    if (u4[i] <= options.floor) u4[i] = 0.0;
  }
  // tail[i] = int_{s_i}^inf ||u||_{r+4}, the last snapshot extended by its decay rate.
  std::vector<double> tail(s.size());
  tail.back() = u4.back() / options.decay_rate;
  for (std::size_t i = s.size() - 1; i-- > 0;) {
    tail[i] = tail[i + 1] + 0.5 * (s[i + 1] - s[i]) * (u4[i] + u4[i + 1]);
  }
  std::optional<std::size_t> i0;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0) continue;
    smallest = std::min(smallest, options.c_hat * tail[i]);
    if (options.c_hat * tail[i] <= 0.5) {
      i0 = i;
      break;
    }
  }
  if (!i0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "smallness condition never met inside the simulated window";
    rep.metrics = {{"smallest_integral", smallest}};
    return out;
  }
  out.s0 = s[*i0];
  out.smallness_at_s0 = options.c_hat * tail[*i0];
  rep.metrics = {{"s0", *out.s0}, {"smallness_at_s0", out.smallness_at_s0}};
  const auto& u0 = traj.snapshots[*i0].coeffs;
  for (int k = 1; k <= options.max_k; ++k) {
    if (!admissible_tail_index(k, options.decay_rate)) continue;
    const double lambda = lambda_of_index(k);
    double lhs = 0.0;
    for (std::size_t i = *i0; i < s.size(); ++i) {
      lhs = std::max(lhs, std::exp(lambda * (s[i] - *out.s0)) * ur[i]);
    }
    double projected = sobolev_norm(project_tail(u0, k), options.r);
    if (ur[*i0] == 0.0) projected = 0.0;
    rep.margins.push_back(2.0 * projected - lhs);
    rep.metrics.emplace_back("lhs_k" + std::to_string(k), lhs);
    rep.metrics.emplace_back("rhs_k" + std::to_string(k), 2.0 * projected);
    out.tested_k.push_back(k);
  }
  rep.verdict = verdict_from_margins(rep.margins, rep.tolerance);
  if (rep.margins.empty()) rep.note = "no admissible k for this decay rate";
  return out;
}

VerificationReport verify_duhamel(const GraphTrajectory& traj, const DuhamelOptions& options) {
  VerificationReport rep;
  rep.check = "duhamel";
  rep.tolerance = options.tolerance;
  rep.inputs_digest = trajectory_digest(traj);
  if (traj.snapshots.empty() || options.stride < 1 || !(options.s1 > options.s)) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "need snapshots, stride >= 1 and s1 > s";
    return rep;
  }
  const std::size_t ia = nearest_index(traj, options.s);
  const std::size_t ib = nearest_index(traj, options.s1);
  const double sa = traj.snapshots[ia].s;
  const double sb = traj.snapshots[ib].s;
  rep.params = {{"r", static_cast<double>(options.r)},
                {"s", sa},
                {"s1", sb},
                {"stride", static_cast<double>(options.stride)}};
  const auto stride = static_cast<std::size_t>(options.stride);
  if (ib <= ia || (ib - ia) % stride != 0 || (ib - ia) / stride < 2) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "insufficient snapshot density for the time quadrature";
    return rep;
  }
  const auto& end = traj.snapshots[ib].coeffs;
  const int l_max = end.l_max();
  std::vector<double> t;
  std::vector<SpectralCoeffs> forcing;
  for (std::size_t i = ia; i <= ib; i += stride) {
    const auto& snap = traj.snapshots[i];
    t.push_back(snap.s);
    const auto rem = nonlinear_remainder(snap, 0);
    SpectralCoeffs truncated(rem.coeffs.dimension(), l_max);
    for (int l = 0; l <= std::min(l_max, rem.coeffs.l_max()); ++l) truncated[l] = rem.coeffs[l];
    forcing.push_back(linear_semigroup(truncated, sb - snap.s));
  }
  SpectralCoeffs rhs = linear_semigroup(traj.snapshots[ia].coeffs, sb - sa);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = 0.5 * (t[i] - t[i - 1]);
    rhs.add_scaled(forcing[i - 1], h);
    rhs.add_scaled(forcing[i], h);
  }
  const SpectralCoeffs diff = end - rhs;
  const double mismatch = sobolev_norm(diff, options.r);
  rep.margins = {options.tolerance - mismatch};
  rep.verdict = mismatch <= options.tolerance ? Verdict::pass : Verdict::fail;
  rep.metrics = {{"mismatch", mismatch}, {"end_norm", sobolev_norm(end, options.r)}};
  for (int l = 0; l <= std::min(l_max, 8); ++l) {
    rep.metrics.emplace_back("mode" + std::to_string(l), std::sqrt(diff[l].norm_squared()));
  }
  return rep;
}

VerificationReport unique_continuation_certificate(const GraphTrajectory& traj,
                                                   const ModeSpectrum& spectrum,
                                                   const CertificateOptions& options) {
  VerificationReport rep;
  rep.check = "unique_continuation";
  rep.tolerance = 0.0;
  rep.inputs_digest = trajectory_digest(traj);
  rep.params = {{"r", static_cast<double>(options.r)},
                {"floor", options.floor},
                {"window_begin", options.window.begin},
                {"window_end", options.window.end},
                {"rate_tolerance", options.rate_tolerance}};
  if (traj.snapshots.empty()) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "empty trajectory";
    return rep;
  }
  const auto ur = norms_of(traj, options.r);
  const double peak = *std::max_element(ur.begin(), ur.end());
  rep.metrics = {{"max_norm", peak}};
  if (peak <= options.floor) {
    rep.verdict = Verdict::rigid;
    rep.margins = {options.floor - peak};
    rep.note = "u is identically zero to tolerance";
    return rep;
  }

  const FitWindow window{std::max(options.window.begin, traj.snapshots.front().s),
                         std::min(options.window.end, traj.snapshots.back().s)};
  const auto sliding = sliding_decay_fits(traj, options.r, window, options.sliding_width,
                                          options.sliding_stride, options.floor);
  std::vector<double> rates;
  for (const auto& f : sliding) {
    if (!f.at_floor && std::isfinite(f.rate)) rates.push_back(f.rate);
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rep.metrics.emplace_back("sliding_rate" + std::to_string(i), rates[i]);
  }

  auto matching_lambda = [&](double rate) -> std::optional<ModeEntry> {
    std::optional<ModeEntry> best;
    for (const auto& e : spectrum.entries) {
      const double lambda = e.lambda.value();
      if (lambda <= 0.0) continue;
      if (!best || std::abs(rate - lambda) < std::abs(rate - best->lambda.value())) best = e;
    }
    if (best && std::abs(rate - best->lambda.value()) <= options.rate_tolerance * best->lambda.value()) {
      return best;
    }
    return std::nullopt;
  };

  // Super-exponential decay shows up as sliding rates that keep climbing.
  if (rates.size() >= 3) {
    bool rising = true;
    for (std::size_t i = 1; i < rates.size(); ++i) {
      rising = rising && rates[i] > rates[i - 1] + options.monotone_slack;
    }
    double top = 0.0;
    for (const auto& e : spectrum.entries) top = std::max(top, e.lambda.value());
    if (rising && rates.back() - rates.front() > 1.0 && !matching_lambda(rates.back()) &&
        rates.back() > top) {
      rep.verdict = Verdict::violation;
      rep.note = "sliding decay rates increase without settling on an eigenvalue";
      return rep;
    }
  }

  DecayFit fit_r;
  DecayFit fit_r1;
  try {
    fit_r = decay_fit(traj, options.r, window, options.floor);
    fit_r1 = decay_fit(traj, options.r + 1, window, options.floor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::invalid_input) throw;
    rep.verdict = Verdict::inconclusive;
    rep.note = e.what();
    return rep;
  }
  rep.metrics.emplace_back("rate_r", fit_r.rate);
  rep.metrics.emplace_back("rate_r1", fit_r1.rate);
  rep.metrics.emplace_back("residual_r", fit_r.residual);
  if (!fit_r.reliable || !fit_r1.reliable) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "decay fits unreliable";
    return rep;
  }
  const auto match = matching_lambda(fit_r.rate);
  if (!match) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "fitted rate matches no eigenvalue";
    return rep;
  }
  const double lambda = match->lambda.value();
  rep.metrics.emplace_back("lambda", lambda);
  rep.metrics.emplace_back("mode", static_cast<double>(match->l));
  rep.margins = {options.rate_tolerance * lambda - std::abs(fit_r.rate - lambda),
                 options.rate_tolerance * lambda - std::abs(fit_r1.rate - lambda)};
  bool approaching = true;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    approaching = approaching &&
                  std::abs(rates[i] - lambda) <= std::abs(rates[i - 1] - lambda) + options.monotone_slack;
  }
  if (rep.margins[1] >= 0.0 && approaching) {
    rep.verdict = Verdict::quantized;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.note = approaching ? "rate at r + 1 disagrees" : "sliding rates do not settle";
  }
  return rep;
}

std::string trajectory_digest(const GraphTrajectory& traj) {
  std::vector<double> data;
  for (const auto& snap : traj.snapshots) {
    data.push_back(snap.s);
    for (const auto& b : snap.coeffs.blocks()) {
      data.push_back(b.cos_part);
      data.push_back(b.sin_part);
    }
  }
  return sha256_hex(data);
}

}  // namespace mcflab
