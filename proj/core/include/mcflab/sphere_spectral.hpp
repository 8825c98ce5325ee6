#pragma once

// Spectral calculus on the round sphere of radius sqrt(2n), the stationary
// solution of the rescaled flow. Transforms are implemented for n = 1 (the
// circle of radius sqrt(2)); the eigenvalue tables hold for every n.

#include <cstdint>
#include <span>
#include <vector>

#include "mcflab/common.hpp"

namespace mcflab {

/// Equispaced quadrature nodes theta_j = 2*pi*j/m on the sphere of radius
/// sqrt(2n).
class SphereGrid {
 public:
  SphereGrid(int n, int m);

  /// The n = 1 grid: m nodes on the circle of radius sqrt(2).
  static SphereGrid circle(int m) { return SphereGrid(1, m); }

  int dimension() const { return n_; }
  int nodes() const { return m_; }
  double radius() const;
  double angle(int j) const;

  /// Largest mode a transform on this grid can resolve, (m - 1) / 2.
  int capacity() const { return (m_ - 1) / 2; }
  /// Largest mode that keeps quadratic products alias free, m / 4.
  int dealiased_capacity() const { return m_ / 4; }

  bool operator==(const SphereGrid&) const = default;

 private:
  int n_;
  int m_;
};

/// Coefficients of a real function in the orthonormal eigenbasis of the
/// radius-sqrt(2) circle. Basis functions are normalized against the
/// unnormalized arclength measure, so the l = 0 function is 1/sqrt(2*pi*R)
/// and the l >= 1 functions are cos(l*theta)/sqrt(pi*R), sin(l*theta)/sqrt(pi*R).
/// With this convention the plain sum of squares is the L2 norm squared.
struct ModeBlock {
  double cos_part = 0.0;
  double sin_part = 0.0;  // always zero for l = 0

  double norm_squared() const { return cos_part * cos_part + sin_part * sin_part; }
  bool operator==(const ModeBlock&) const = default;
};

class SpectralCoeffs {
 public:
  SpectralCoeffs() = default;
  SpectralCoeffs(int n, int l_max);
  SpectralCoeffs(int n, std::vector<ModeBlock> blocks);

  int dimension() const { return n_; }
  int l_max() const { return static_cast<int>(blocks_.size()) - 1; }

  ModeBlock& operator[](int l) { return blocks_.at(static_cast<std::size_t>(l)); }
  const ModeBlock& operator[](int l) const {
    return blocks_.at(static_cast<std::size_t>(l));
  }
  std::span<const ModeBlock> blocks() const { return blocks_; }

  /// this += scale * other; other may have a different l_max.
  SpectralCoeffs& add_scaled(const SpectralCoeffs& other, double scale);
  SpectralCoeffs& operator*=(double scale);
  SpectralCoeffs operator+(const SpectralCoeffs& other) const;
  SpectralCoeffs operator-(const SpectralCoeffs& other) const;

  bool operator==(const SpectralCoeffs&) const = default;

 private:
  int n_ = 1;
  std::vector<ModeBlock> blocks_;
};

SpectralCoeffs operator*(double scale, SpectralCoeffs coeffs);

/// Exact rational number, used for eigenvalue tables.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct ModeEntry {
  int l = 0;
  Rational nu;       // eigenvalue of -Laplacian on the radius-sqrt(2n) sphere
  Rational lambda;   // eigenvalue of -Laplacian - 1, i.e. nu - 1
  std::int64_t multiplicity = 1;
  int distinct_index = 1;  // position in the list lambda_1 < lambda_2 < ...
};

/// Eigenvalues of -Laplacian - 1 by mode number, with the table converting
/// mode numbers to the 1-based distinct-eigenvalue index used by the tail
/// projections. Every mode carries a distinct eigenvalue, so the conversion
/// is index = l + 1; multiplicities are recorded alongside.
struct ModeSpectrum {
  int n = 1;
  std::vector<ModeEntry> entries;

  const ModeEntry& mode(int l) const { return entries.at(static_cast<std::size_t>(l)); }
  /// Entry for the 1-based distinct index k.
  const ModeEntry& distinct(int k) const;
};

ModeSpectrum mode_spectrum(int n, int l_max);

/// nu_l = l(l + n - 1) / (2n) as a double.
double laplacian_eigenvalue(int n, int l);
/// lambda_l = nu_l - 1.
double linearized_eigenvalue(int n, int l);

/// Forward transform of samples on the n = 1 grid. Throws
/// ErrorCode::aliasing when m < 2 l_max + 1 and ErrorCode::invalid_input for
/// non-finite samples.
SpectralCoeffs analyze(std::span<const double> samples, const SphereGrid& grid, int l_max);
/// analyze with l_max = grid.capacity().
SpectralCoeffs analyze(std::span<const double> samples, const SphereGrid& grid);

std::vector<double> synthesize(const SpectralCoeffs& coeffs, const SphereGrid& grid);

/// Multiplies mode l by -nu_l.
SpectralCoeffs laplace_beltrami(const SpectralCoeffs& coeffs);

/// (sum_l (1 + nu_l)^r |block_l|^2)^(1/2).
double sobolev_norm(const SpectralCoeffs& coeffs, int r);

/// Spectral L2 inner product.
double inner_product(const SpectralCoeffs& a, const SpectralCoeffs& b);

/// Orthogonal projection onto the eigenspaces lambda_j with j >= k, using the
/// 1-based distinct-eigenvalue index k. tail(., 1) is the identity.
SpectralCoeffs project_tail(const SpectralCoeffs& coeffs, int k);

/// The linear semigroup exp(t (Laplacian + 1)): mode l scaled by exp(-lambda_l t).
SpectralCoeffs linear_semigroup(const SpectralCoeffs& coeffs, double t);

/// Maximum absolute value over the grid nodes.
double sup_norm(std::span<const double> samples);

/// First and second derivatives in angle of periodic samples on an
/// equispaced grid, computed spectrally.
struct AngularDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};
AngularDerivatives angular_derivatives(std::span<const double> samples);

/// Band-limited trigonometric interpolant of equispaced periodic samples.
/// Evaluates the value and its first two derivatives at arbitrary angles.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const double> samples);

  struct Jet {
    double value;
    double first;
    double second;
  };

  Jet evaluate(double theta) const;
  double operator()(double theta) const { return evaluate(theta).value; }
  int degree() const { return static_cast<int>(a_.size()) - 1; }

 private:
  std::vector<double> a_;  // cosine coefficients, a_[0] is the mean
  std::vector<double> b_;  // sine coefficients
};

}  // namespace mcflab
