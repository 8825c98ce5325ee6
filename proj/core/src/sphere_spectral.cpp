#include "mcflab/sphere_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fourier.hpp"

namespace mcflab {

using std::numbers::pi;

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::convexity_loss: return "convexity_loss";
    case ErrorCode::step_rejected: return "step_rejected";
    case ErrorCode::step_underflow: return "step_underflow";
    case ErrorCode::domain: return "domain";
    case ErrorCode::graph_condition: return "graph_condition";
    case ErrorCode::not_star_shaped: return "not_star_shaped";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

SphereGrid::SphereGrid(int n, int m) : n_(n), m_(m) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "sphere dimension must be >= 1");
  if (m < 3) throw Error(ErrorCode::invalid_input, "sphere grid needs at least 3 nodes");
}

double SphereGrid::radius() const { return std::sqrt(2.0 * n_); }

double SphereGrid::angle(int j) const { return 2.0 * pi * j / m_; }

SpectralCoeffs::SpectralCoeffs(int n, int l_max)
    : n_(n), blocks_(static_cast<std::size_t>(l_max + 1)) {
  if (l_max < 0) throw Error(ErrorCode::invalid_input, "l_max must be >= 0");
}

SpectralCoeffs::SpectralCoeffs(int n, std::vector<ModeBlock> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw Error(ErrorCode::invalid_input, "coefficients need an l = 0 block");
  if (blocks_[0].sin_part != 0.0) {
    throw Error(ErrorCode::invalid_input, "the l = 0 block has no sine part");
  }
}

SpectralCoeffs& SpectralCoeffs::add_scaled(const SpectralCoeffs& other, double scale) {
  if (other.l_max() > l_max()) blocks_.resize(other.blocks_.size());
  for (int l = 0; l <= other.l_max(); ++l) {
    blocks_[l].cos_part += scale * other.blocks_[l].cos_part;
    blocks_[l].sin_part += scale * other.blocks_[l].sin_part;
  }
  return *this;
}

SpectralCoeffs& SpectralCoeffs::operator*=(double scale) {
  for (auto& b : blocks_) {
    b.cos_part *= scale;
    b.sin_part *= scale;
  }
  return *this;
}

SpectralCoeffs SpectralCoeffs::operator+(const SpectralCoeffs& other) const {
  SpectralCoeffs out = *this;
  return out.add_scaled(other, 1.0);
}

SpectralCoeffs SpectralCoeffs::operator-(const SpectralCoeffs& other) const {
  SpectralCoeffs out = *this;
  return out.add_scaled(other, -1.0);
}

SpectralCoeffs operator*(double scale, SpectralCoeffs coeffs) {
  coeffs *= scale;
  return coeffs;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::invalid_input, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / g, den / g};
}

const ModeEntry& ModeSpectrum::distinct(int k) const {
  if (k < 1 || k > static_cast<int>(entries.size())) {
    throw Error(ErrorCode::invalid_input, "distinct eigenvalue index out of range");
  }
  return entries[static_cast<std::size_t>(k - 1)];
}

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < k) return 0;
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double basis_scale(int l, double radius) {
  // Converts between plain Fourier amplitudes and orthonormal coefficients.
  return l == 0 ? std::sqrt(2.0 * pi * radius) : std::sqrt(pi * radius);
}

void require_circle(const SphereGrid& grid) {
  if (grid.dimension() != 1) {
    throw Error(ErrorCode::unsupported, "transforms are implemented for n = 1 only");
  }
}

}  // namespace

double laplacian_eigenvalue(int n, int l) {
  return static_cast<double>(l) * (l + n - 1) / (2.0 * n);
}

double linearized_eigenvalue(int n, int l) { return laplacian_eigenvalue(n, l) - 1.0; }

ModeSpectrum mode_spectrum(int n, int l_max) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "dimension index must be >= 1");
  if (l_max < 0) throw Error(ErrorCode::invalid_input, "l_max must be >= 0");
  ModeSpectrum out;
  out.n = n;
  out.entries.reserve(static_cast<std::size_t>(l_max + 1));
  for (int l = 0; l <= l_max; ++l) {
    ModeEntry e;
    e.l = l;
    e.nu = Rational::make(static_cast<std::int64_t>(l) * (l + n - 1), 2 * n);
    e.lambda = Rational::make(e.nu.num - e.nu.den, e.nu.den);
    e.multiplicity = binomial(l + n, n) - binomial(l + n - 2, n);
    e.distinct_index = l + 1;
    out.entries.push_back(e);
  }
  return out;
}

SpectralCoeffs analyze(std::span<const double> samples, const SphereGrid& grid, int l_max) {
  require_circle(grid);
  const int m = grid.nodes();
  if (static_cast<int>(samples.size()) != m) {
    throw Error(ErrorCode::invalid_input, "sample count does not match grid");
  }
  if (l_max < 0) throw Error(ErrorCode::invalid_input, "l_max must be >= 0");
  if (m < 2 * l_max + 1) {
    throw Error(ErrorCode::aliasing, "grid of " + std::to_string(m) +
                                         " nodes cannot resolve l_max = " +
                                         std::to_string(l_max));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_input, "non-finite sample");
  }
  const auto spectrum = detail::forward(samples);
  const double radius = grid.radius();
  SpectralCoeffs out(grid.dimension(), l_max);
  out[0].cos_part = spectrum[0].real() / m * basis_scale(0, radius);
  for (int l = 1; l <= l_max; ++l) {
    const double s = 2.0 / m * basis_scale(l, radius);
    out[l].cos_part = spectrum[l].real() * s;
    out[l].sin_part = -spectrum[l].imag() * s;
  }
  return out;
}

SpectralCoeffs analyze(std::span<const double> samples, const SphereGrid& grid) {
  return analyze(samples, grid, grid.capacity());
}

std::vector<double> synthesize(const SpectralCoeffs& coeffs, const SphereGrid& grid) {
  require_circle(grid);
  const int m = grid.nodes();
  if (coeffs.l_max() > grid.capacity()) {
    throw Error(ErrorCode::aliasing, "l_max = " + std::to_string(coeffs.l_max()) +
                                         " exceeds the capacity of a " + std::to_string(m) +
                                         "-node grid");
  }
  const double radius = grid.radius();
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(m / 2 + 1));
  spectrum[0] = coeffs[0].cos_part / basis_scale(0, radius);
  for (int l = 1; l <= coeffs.l_max(); ++l) {
    // inverse() is unnormalized: a cosine amplitude a contributes a/2 at +-l.
    const double s = 0.5 / basis_scale(l, radius);
    spectrum[l] = {coeffs[l].cos_part * s, -coeffs[l].sin_part * s};
  }
  return detail::inverse(spectrum, m);
}

SpectralCoeffs laplace_beltrami(const SpectralCoeffs& coeffs) {
  SpectralCoeffs out = coeffs;
  for (int l = 0; l <= out.l_max(); ++l) {
    const double nu = laplacian_eigenvalue(coeffs.dimension(), l);
    out[l].cos_part *= -nu;
    out[l].sin_part *= -nu;
  }
  return out;
}

double sobolev_norm(const SpectralCoeffs& coeffs, int r) {
  if (r < 0) throw Error(ErrorCode::invalid_input, "Sobolev index must be >= 0");
  double sum = 0.0;
  for (int l = 0; l <= coeffs.l_max(); ++l) {
    const double weight = std::pow(1.0 + laplacian_eigenvalue(coeffs.dimension(), l), r);
    sum += weight * coeffs[l].norm_squared();
  }
  return std::sqrt(sum);
}

double inner_product(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  const int l_max = std::min(a.l_max(), b.l_max());
  double sum = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    sum += a[l].cos_part * b[l].cos_part + a[l].sin_part * b[l].sin_part;
  }
  return sum;
}

SpectralCoeffs project_tail(const SpectralCoeffs& coeffs, int k) {
  if (k < 1) throw Error(ErrorCode::invalid_input, "tail projection index must be >= 1");
  SpectralCoeffs out = coeffs;
  // Distinct index k corresponds to mode l = k - 1.
  for (int l = 0; l <= std::min(k - 2, out.l_max()); ++l) out[l] = ModeBlock{};
  return out;
}

SpectralCoeffs linear_semigroup(const SpectralCoeffs& coeffs, double t) {
  SpectralCoeffs out = coeffs;
  for (int l = 0; l <= out.l_max(); ++l) {
    const double f = std::exp(-linearized_eigenvalue(coeffs.dimension(), l) * t);
    out[l].cos_part *= f;
    out[l].sin_part *= f;
  }
  return out;
}

double sup_norm(std::span<const double> samples) {
  double out = 0.0;
  for (double v : samples) out = std::max(out, std::abs(v));
  return out;
}

AngularDerivatives angular_derivatives(std::span<const double> samples) {
  const int m = static_cast<int>(samples.size());
  auto spectrum = detail::forward(samples);
  std::vector<std::complex<double>> d1(spectrum.size());
  std::vector<std::complex<double>> d2(spectrum.size());
  for (int k = 0; k <= m / 2; ++k) {
    const double kk = k;
    d1[k] = std::complex<double>(0.0, kk) * spectrum[k];
    d2[k] = -kk * kk * spectrum[k];
  }
  // The Nyquist mode has no well-defined odd derivative on an even grid.
  if (m % 2 == 0) d1[m / 2] = 0.0;
  AngularDerivatives out{detail::inverse(d1, m), detail::inverse(d2, m)};
  for (auto& v : out.first) v /= m;
  for (auto& v : out.second) v /= m;
  return out;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples) {
  const int m = static_cast<int>(samples.size());
  if (m < 3) throw Error(ErrorCode::invalid_input, "interpolant needs at least 3 samples");
  const auto spectrum = detail::forward(samples);
  const int degree = m / 2;
  a_.assign(static_cast<std::size_t>(degree + 1), 0.0);
  b_.assign(static_cast<std::size_t>(degree + 1), 0.0);
  a_[0] = spectrum[0].real() / m;
  for (int k = 1; k <= degree; ++k) {
    a_[k] = 2.0 * spectrum[k].real() / m;
    b_[k] = -2.0 * spectrum[k].imag() / m;
  }
  if (m % 2 == 0) {
    // Split the Nyquist term symmetrically so the interpolant stays real.
    a_[degree] *= 0.5;
    b_[degree] = 0.0;
  }
}

TrigInterpolant::Jet TrigInterpolant::evaluate(double theta) const {
  Jet out{a_[0], 0.0, 0.0};
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double ck = 1.0;
  double sk = 0.0;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
    const double kk = static_cast<double>(k);
    const double even = a_[k] * ck + b_[k] * sk;
    out.value += even;
    out.first += kk * (b_[k] * ck - a_[k] * sk);
    out.second -= kk * kk * even;
  }
  return out;
}

}  // namespace mcflab
