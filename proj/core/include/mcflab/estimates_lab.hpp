#pragma once

// Numerical checks of the estimates behind the rigidity argument for the
// rescaled flow d_s u = (Delta + 1) u + N(u) on the circle of radius sqrt(2):
// the quadratic bound on N, the key tail inequality, the factor-2 sup bound,
// the variation of constants formula, and decay-rate quantization.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mcflab/report.hpp"
#include "mcflab/rescale_graph.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace mcflab {

/// Full speed d_s u of a radial graph rho = sqrt(2) + u under the rescaled
/// flow: [-kappa + rho^2 / (2W)] W / rho with W = sqrt(rho^2 + rho_theta^2).
/// Throws ErrorCode::graph_condition if rho <= 0 at a node.
std::vector<double> rmcf_rhs(const GraphSnapshot& u);

/// (Delta + 1) u at the grid nodes.
std::vector<double> linear_part(const GraphSnapshot& u);

struct NonlinearRemainder {
  double s = 0.0;
  SpectralCoeffs coeffs;
  std::map<int, double> norms;  // r -> ||N(u)||_r
};

/// N(u) = rmcf_rhs(u) - (Delta + 1) u, analyzed up to the grid capacity.
NonlinearRemainder nonlinear_remainder(const GraphSnapshot& u, int r_max = 6);

/// Random band-limited graphs with ||u||_r uniform in [0.1, 1] * max_norm.
/// Coefficients are Gaussian with standard deviation (1 + l)^-3.
std::vector<GraphSnapshot> random_graph_samples(std::uint64_t seed, int count,
                                                const SphereGrid& grid, int l_max, int r,
                                                double max_norm);

struct QuadraticBoundResult {
  VerificationReport report;
  double c_hat = 0.0;       // sup of ||N||_r / (||u||_{r+1} ||u||_{r+2})
  double c_half = 0.0;      // same sup over the first half of the samples
  double min_chain_slack = 0.0;
  int excluded = 0;         // samples with ||u||_r > 1
};

/// Empirical constant of the quadratic bound and the chain
/// ||u||_{r+1}||u||_{r+2} <= ||u||_{r+2}^2 <= ||u||_r ||u||_{r+4} per sample.
QuadraticBoundResult check_quadratic_bound(std::span<const GraphSnapshot> samples, int r);

/// Least-squares slope of ||N(eps u)||_r against eps on a log-log scale.
double remainder_scaling_order(const GraphSnapshot& u, std::span<const double> eps, int r);

struct FitWindow {
  double begin = 0.0;
  double end = 0.0;
};

struct DecayFit {
  int r = 0;
  FitWindow window;
  double rate = 0.0;       // ||u||_r ~ amplitude * exp(-rate s)
  double amplitude = 0.0;
  double residual = 0.0;   // max |log deviation| over the window
  int samples = 0;
  bool reliable = false;   // residual <= 0.1
  bool at_floor = false;   // every norm <= floor: identically zero to tolerance
};

/// Fits ||u(s)||_r on the snapshots inside `window`. Throws
/// ErrorCode::invalid_input with fewer than min_samples snapshots.
DecayFit decay_fit(const GraphTrajectory& traj, int r, FitWindow window, double floor = 1e-12,
                   int min_samples = 20);

/// Same fit on an explicit series of (s, value) pairs, e.g. a mode track.
DecayFit decay_fit(std::span<const double> s, std::span<const double> values, FitWindow window,
                   double floor = 1e-12, int min_samples = 20);

/// Fits on windows of `width` advanced by `stride` across `range`.
std::vector<DecayFit> sliding_decay_fits(const GraphTrajectory& traj, int r, FitWindow range,
                                         double width, double stride, double floor = 1e-12,
                                         int min_samples = 10);

/// Whether tail index k is admissible for the key inequality under decay
/// rate `rate`: lambda_k < 2 rate (the majorant converges) and
/// lambda_{k-1} < rate (lower modes decay fast enough to be written
/// backwards in time).
bool admissible_tail_index(int k, double rate);

struct KeyInequalityOptions {
  int k = 3;             // 1-based distinct eigenvalue index
  int r = 2;
  double s0 = 3.0;
  double horizon = 4.0;  // margins on [s0, s0 + horizon]
  double decay_rate = 1.0;
  double c_hat = 0.0;    // > 0 adds the majorized variant as metrics
  double tolerance = 1e-6;
};

/// exp(lambda_k (s - s0)) ||u(s)||_r
///   <= ||Pi_k u(s0)||_r + int_{s0}^inf exp(lambda_k (t - s0)) ||N(u(t))||_r dt,
/// with the integral taken by trapezoid over the snapshots plus the tail
/// bound exp(lambda_k (s_max - s0)) ||N(s_max)||_r / (2 rate - lambda_k).
VerificationReport verify_key_inequality(const GraphTrajectory& traj,
                                         const KeyInequalityOptions& options);

struct SupBoundResult {
  VerificationReport report;
  std::optional<double> s0;     // least s with c_hat int_s^inf ||u||_{r+4} <= 1/2
  double smallness_at_s0 = 0.0;
  std::vector<int> tested_k;
};

struct SupBoundOptions {
  int r = 2;
  double c_hat = 1.0;
  double decay_rate = 1.0;
  double floor = 1e-8;   // trajectories below this are treated as zero
  int max_k = 12;
  double tolerance = 1e-6;
};

/// Finds the least s0 meeting the smallness condition, then checks
/// sup_{t >= s0} exp(lambda_k (t - s0)) ||u(t)||_r <= 2 ||Pi_k u(s0)||_r for
/// each admissible k.
SupBoundResult verify_sup_bound(const GraphTrajectory& traj, const SupBoundOptions& options);

struct DuhamelOptions {
  int r = 2;
  double s = 3.0;
  double s1 = 4.0;
  int stride = 1;         // use every stride-th snapshot for the quadrature
  double tolerance = 1e-4;
};

/// Mode-by-mode check of u(s1) = e^{L(s1-s)} u(s) + int_s^{s1} e^{L(s1-t)} N(u(t)) dt
/// with L = Delta + 1, trapezoid in t. Metric "mismatch" is the H^r norm
/// of the difference.
VerificationReport verify_duhamel(const GraphTrajectory& traj, const DuhamelOptions& options);

struct CertificateOptions {
  int r = 2;
  double floor = 1e-8;
  FitWindow window{5.0, 10.0};
  double rate_tolerance = 0.05;   // relative
  double sliding_width = 1.0;
  double sliding_stride = 0.5;
  double monotone_slack = 0.02;
};

/// rigid: ||u||_r at the floor everywhere. quantized: fitted rates at r and
/// r + 1 match one positive lambda_l and sliding rates approach it without
/// rising. violation: sliding rates rise steadily past every eigenvalue
/// while u stays above the floor. Anything else is inconclusive.
VerificationReport unique_continuation_certificate(const GraphTrajectory& traj,
                                                   const ModeSpectrum& spectrum,
                                                   const CertificateOptions& options = {});

/// Digest of the spectral content of a graph trajectory.
std::string trajectory_digest(const GraphTrajectory& traj);

}  // namespace mcflab
