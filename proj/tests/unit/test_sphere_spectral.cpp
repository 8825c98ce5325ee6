#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "mcflab/sphere_spectral.hpp"

namespace {

using namespace mcflab;
using std::numbers::pi;

std::vector<double> samples_of(const SphereGrid& grid, auto f) {
  std::vector<double> out(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j < grid.nodes(); ++j) out[j] = f(grid.angle(j));
  return out;
}

SpectralCoeffs random_coeffs(std::mt19937_64& rng, int l_max) {
  std::normal_distribution<double> g;
  SpectralCoeffs c(1, l_max);
  for (int l = 0; l <= l_max; ++l) {
    c[l].cos_part = g(rng);
    if (l > 0) c[l].sin_part = g(rng);
  }
  return c;
}

// Direct quadrature against the orthonormal basis, no FFT.
SpectralCoeffs direct_analyze(const std::vector<double>& u, const SphereGrid& grid, int l_max) {
  const double radius = grid.radius();
  const double w = 2.0 * pi * radius / grid.nodes();
  SpectralCoeffs c(1, l_max);
  for (int l = 0; l <= l_max; ++l) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < grid.nodes(); ++j) {
      const double t = grid.angle(j);
      if (l == 0) {
        a += u[j] / std::sqrt(2.0 * pi * radius);
      } else {
        a += u[j] * std::cos(l * t) / std::sqrt(pi * radius);
        b += u[j] * std::sin(l * t) / std::sqrt(pi * radius);
      }
    }
    c[l].cos_part = a * w;
    c[l].sin_part = b * w;
  }
  return c;
}

TEST(SphereGrid, RadiusSquaredIsTwoN) {
  for (int n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(SphereGrid(n, 16).radius() * SphereGrid(n, 16).radius(), 2.0 * n);
  const auto g = SphereGrid::circle(64);
  EXPECT_EQ(g.capacity(), 31);
  EXPECT_EQ(g.dealiased_capacity(), 16);
}

TEST(Analyze, ConstantHasOnlyModeZero) {
  const auto grid = SphereGrid::circle(32);
  const auto c = analyze(std::vector<double>(32, 3.0), grid);
  EXPECT_NEAR(c[0].cos_part, 3.0 * std::sqrt(2.0 * pi * grid.radius()), 1e-12);
  for (int l = 1; l <= c.l_max(); ++l) EXPECT_NEAR(std::sqrt(c[l].norm_squared()), 0.0, 1e-13);
}

TEST(Analyze, PureCosineHitsOneMode) {
  const auto grid = SphereGrid::circle(32);
  const auto c = analyze(samples_of(grid, [](double t) { return std::cos(2.0 * t); }), grid);
  for (int l = 0; l <= c.l_max(); ++l) {
    if (l == 2) {
      EXPECT_NEAR(c[l].cos_part, std::sqrt(pi * grid.radius()), 1e-12);
      EXPECT_NEAR(c[l].sin_part, 0.0, 1e-13);
    } else {
      EXPECT_NEAR(std::sqrt(c[l].norm_squared()), 0.0, 1e-13) << "l = " << l;
    }
  }
}

TEST(Analyze, MatchesDirectQuadrature) {
  std::mt19937_64 rng(11);
  const auto grid = SphereGrid::circle(64);
  const auto u = synthesize(random_coeffs(rng, 20), grid);
  const auto fast = analyze(u, grid, 20);
  const auto slow = direct_analyze(u, grid, 20);
  for (int l = 0; l <= 20; ++l) {
    EXPECT_NEAR(fast[l].cos_part, slow[l].cos_part, 1e-12);
    EXPECT_NEAR(fast[l].sin_part, slow[l].sin_part, 1e-12);
  }
}

TEST(Analyze, RoundTripOnBandLimitedInput) {
  std::mt19937_64 rng(5);
  const auto grid = SphereGrid::circle(128);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_coeffs(rng, 40);
    const auto u = synthesize(c, grid);
    const auto back = synthesize(analyze(u, grid, 40), grid);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      err = std::max(err, std::abs(back[j] - u[j]));
      scale = std::max(scale, std::abs(u[j]));
    }
    EXPECT_LE(err / scale, 1e-12);
    const auto c2 = analyze(u, grid, 40);
    for (int l = 0; l <= 40; ++l) EXPECT_NEAR(c2[l].cos_part, c[l].cos_part, 1e-12);
  }
}

TEST(Analyze, Parseval) {
  std::mt19937_64 rng(3);
  const auto grid = SphereGrid::circle(64);
  const auto c = random_coeffs(rng, 25);
  const auto u = synthesize(c, grid);
  double l2 = 0.0;
  for (double v : u) l2 += v * v;
  l2 *= 2.0 * pi * grid.radius() / grid.nodes();
  double sum = 0.0;
  for (const auto& b : c.blocks()) sum += b.norm_squared();
  EXPECT_NEAR(sum / l2, 1.0, 1e-12);
  EXPECT_NEAR(sobolev_norm(c, 0) * sobolev_norm(c, 0), l2, 1e-10 * l2);
  EXPECT_NEAR(inner_product(c, c), sum, 1e-12 * sum);
}

TEST(Analyze, RejectsAliasingAndNonFinite) {
  const auto grid = SphereGrid::circle(16);
  std::vector<double> u(16, 1.0);
  EXPECT_THROW(
      {
        try {
          analyze(u, grid, 8);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::aliasing);
          throw;
        }
      },
      Error);
  u[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    analyze(u, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_input);
  }
}

TEST(ModeSpectrum, ClosedFormsForSeveralDimensions) {
  for (int n = 1; n <= 5; ++n) {
    const auto s = mode_spectrum(n, 6);
    EXPECT_EQ(s.mode(0).lambda.value(), -1.0);
    EXPECT_EQ(s.mode(1).lambda.value(), -0.5);
    EXPECT_DOUBLE_EQ(s.mode(2).lambda.value(), 1.0 / n);
    for (int l = 0; l <= 6; ++l) {
      EXPECT_DOUBLE_EQ(s.mode(l).nu.value(), l * (l + n - 1.0) / (2.0 * n));
      EXPECT_DOUBLE_EQ(laplacian_eigenvalue(n, l), s.mode(l).nu.value());
      EXPECT_DOUBLE_EQ(linearized_eigenvalue(n, l), s.mode(l).nu.value() - 1.0);
      EXPECT_EQ(s.distinct(l + 1).l, l);
      if (l > 0) EXPECT_LT(s.mode(l - 1).lambda.value(), s.mode(l).lambda.value());
    }
  }
  const auto s1 = mode_spectrum(1, 4);
  EXPECT_EQ(s1.mode(0).multiplicity, 1);
  EXPECT_EQ(s1.mode(3).multiplicity, 2);
  const auto s2 = mode_spectrum(2, 4);
  for (int l = 0; l <= 4; ++l) EXPECT_EQ(s2.mode(l).multiplicity, 2 * l + 1);
}

TEST(ModeSpectrum, MatchesFiniteDifferenceLaplacianOnCircle) {
  const int m = 400;
  const double radius = std::sqrt(2.0);
  const double h = 2.0 * pi * radius / m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = 2.0 / (h * h);
    a(i, (i + 1) % m) = -1.0 / (h * h);
    a(i, (i + m - 1) % m) = -1.0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto ev = es.eigenvalues();
  // 0, then each nu_l = l^2 / 2 twice.
  EXPECT_NEAR(ev(0), 0.0, 1e-9);
  for (int l = 1; l <= 4; ++l) {
    EXPECT_NEAR(ev(2 * l - 1), laplacian_eigenvalue(1, l), 2e-4 * l * l);
    EXPECT_NEAR(ev(2 * l), laplacian_eigenvalue(1, l), 2e-4 * l * l);
  }
}

TEST(ModeSpectrum, MatchesAxisymmetricSphereOperator) {
  // -(1 / (R^2 sin p)) d/dp (sin p du/dp) on the radius-2 sphere, cell centered.
  const int m = 400;
  const double radius = 2.0;
  const double h = pi / m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double p = (i + 0.5) * h;
    const double sp = std::sin(p + 0.5 * h);
    const double sm = std::sin(p - 0.5 * h);
    mass(i, i) = radius * radius * std::sin(p);
    if (i + 1 < m) {
      a(i, i) += sp / (h * h);
      a(i, i + 1) -= sp / (h * h);
    }
    if (i > 0) {
      a(i, i) += sm / (h * h);
      a(i, i - 1) -= sm / (h * h);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, mass);
  for (int l = 0; l <= 4; ++l) EXPECT_NEAR(es.eigenvalues()(l), laplacian_eigenvalue(2, l), 1e-3);
}

TEST(LaplaceBeltrami, MatchesFiniteDifferenceInArclength) {
  const auto grid = SphereGrid::circle(1024);
  const int m = grid.nodes();
  auto f = [](double t) { return std::cos(3.0 * t) + 0.5 * std::sin(5.0 * t); };
  const auto u = samples_of(grid, f);
  const auto lap = synthesize(laplace_beltrami(analyze(u, grid, 20)), grid);
  const double ds = 2.0 * pi * grid.radius() / m;
  for (int j = 0; j < m; ++j) {
    const double fd = (u[(j + 1) % m] - 2.0 * u[j] + u[(j + m - 1) % m]) / (ds * ds);
    EXPECT_NEAR(lap[j], fd, 1e-3);
  }
}

TEST(ProjectTail, IdempotentContractionAndZeroedLowModes) {
  std::mt19937_64 rng(8);
  const auto c = random_coeffs(rng, 12);
  EXPECT_EQ(project_tail(c, 1), c);
  for (int k = 1; k <= 8; ++k) {
    const auto p = project_tail(c, k);
    EXPECT_EQ(project_tail(p, k), p);
    for (int r = 0; r <= 4; ++r) EXPECT_LE(sobolev_norm(p, r), sobolev_norm(c, r) * (1 + 1e-15));
    for (int l = 0; l <= 12; ++l) {
      if (l <= k - 2) EXPECT_EQ(p[l].norm_squared(), 0.0);
      else EXPECT_EQ(p[l], c[l]);
    }
    // Orthogonality of tail and complement.
    EXPECT_NEAR(inner_product(p, c - p), 0.0, 1e-12);
  }
}

TEST(LinearSemigroup, GroupLawAndEigenScaling) {
  std::mt19937_64 rng(9);
  const auto c = random_coeffs(rng, 6);
  const auto a = linear_semigroup(linear_semigroup(c, 0.3), 0.4);
  const auto b = linear_semigroup(c, 0.7);
  for (int l = 0; l <= 6; ++l) {
    EXPECT_NEAR(a[l].cos_part, b[l].cos_part, 1e-13 * (1 + std::abs(b[l].cos_part)));
    EXPECT_NEAR(b[l].cos_part, c[l].cos_part * std::exp(-linearized_eigenvalue(1, l) * 0.7), 1e-12);
  }
}

TEST(SobolevNorm, MonotoneInIndex) {
  std::mt19937_64 rng(12);
  const auto c = random_coeffs(rng, 10);
  for (int r = 0; r < 8; ++r) EXPECT_LE(sobolev_norm(c, r), sobolev_norm(c, r + 1));
}

TEST(AngularDerivatives, SpectralAccuracy) {
  const auto grid = SphereGrid::circle(64);
  const auto u = samples_of(grid, [](double t) { return std::sin(3.0 * t) + std::cos(t); });
  const auto d = angular_derivatives(u);
  for (int j = 0; j < 64; ++j) {
    const double t = grid.angle(j);
    EXPECT_NEAR(d.first[j], 3.0 * std::cos(3.0 * t) - std::sin(t), 1e-12);
    EXPECT_NEAR(d.second[j], -9.0 * std::sin(3.0 * t) - std::cos(t), 1e-11);
  }
}

TEST(TrigInterpolant, ExactOnBandLimitedFunctions) {
  const auto grid = SphereGrid::circle(32);
  auto f = [](double t) { return 1.0 + std::sin(3.0 * t) - 0.25 * std::cos(5.0 * t); };
  const TrigInterpolant p(samples_of(grid, f));
  for (double t : {0.1, 1.3, 2.9, 5.5}) {
    const auto jet = p.evaluate(t);
    EXPECT_NEAR(jet.value, f(t), 1e-13);
    EXPECT_NEAR(jet.first, 3.0 * std::cos(3.0 * t) + 1.25 * std::sin(5.0 * t), 1e-12);
    EXPECT_NEAR(jet.second, -9.0 * std::sin(3.0 * t) + 6.25 * std::cos(5.0 * t), 1e-11);
  }
}

}  // namespace
