#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mcflab/convex_flow.hpp"
#include "mcflab/levelset_arrival.hpp"

namespace {

using namespace mcflab;

TEST(BallArrival, ClosedFormValues) {
  const std::vector<double> origin{0.0, 0.0};
  EXPECT_DOUBLE_EQ(ball_arrival_exact(origin, 1.0, origin, 1), 0.5);
  EXPECT_DOUBLE_EQ(ball_arrival_exact(std::vector<double>{0.6, 0.8}, 1.0, origin, 1), 0.0);
  const std::vector<double> o3{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(ball_arrival_exact(o3, 2.0, o3, 2), 1.0);
  try {
    ball_arrival_exact(std::vector<double>{2.0, 0.0}, 1.0, origin, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(Domains, SignedDistances) {
  const auto g = square_grid(41, {0.0, 0.0}, 2.0);
  const auto disk = disk_domain(g, 1.0);
  EXPECT_NEAR(disk.phi[g.index(20, 20)], -1.0, 1e-14);
  const auto box = box_domain(g, 1.0, 0.5);
  EXPECT_NEAR(box.phi[g.index(20, 20)], -0.5, 1e-14);
  EXPECT_NEAR(box.phi[g.index(40, 40)], std::hypot(1.0, 1.5), 1e-14);
  const auto ell = ellipse_domain(g, 1.2, 0.8);
  EXPECT_NEAR(ell.phi[g.index(20, 20)], -0.8, 1e-12);
  EXPECT_NEAR(ell.phi[g.index(40, 20)], 0.8, 1e-12);
  // Distance to a circle as a degenerate ellipse.
  const auto circ = ellipse_domain(g, 1.0, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(circ.phi[k], disk.phi[k], 1e-10);
}

TEST(SolveArrival, DiskConvergesToBallSolution) {
  double errors[2];
  int idx = 0;
  for (int nodes : {96, 192}) {
    const auto g = square_grid(nodes, {0.0, 0.0}, 1.1);
    const auto field = solve_arrival(disk_domain(g, 1.0));
    errors[idx++] = ball_error(field, 1.0, {0.0, 0.0}, 4.0 * g.dx);
    EXPECT_NEAR(field.T_hat, 0.5, 1e-2);
    EXPECT_LT(norm(field.x0_hat), g.dx);
    EXPECT_TRUE(field.truncated);
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_GE(std::log2(errors[0] / errors[1]), 0.9);
}

TEST(SolveArrival, SymmetryForCentrallySymmetricDomain) {
  const auto g = square_grid(97, {0.0, 0.0}, 1.35);
  const auto field = solve_arrival(ellipse_domain(g, 1.2, 1.0 / 1.2));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = field.at(i, j);
      const double b = field.at(g.nx - 1 - i, g.ny - 1 - j);
      if (std::isnan(a)) {
        EXPECT_TRUE(std::isnan(b));
        continue;
      }
      // Gauss-Seidel sweep order breaks the symmetry at the 1e-7 level.
      EXPECT_NEAR(a, b, 1e-5);
    }
  }
}

TEST(SolveArrival, DomainMonotonicity) {
  const auto g = square_grid(97, {0.0, 0.0}, 1.1);
  const auto small = solve_arrival(ellipse_domain(g, 0.95, 0.75));
  const auto big = solve_arrival(disk_domain(g, 1.0));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isnan(small.values[k])) continue;
    ASSERT_FALSE(std::isnan(big.values[k]));
    EXPECT_LE(small.values[k], big.values[k] + 2e-3);
  }
}

TEST(SolveArrival, SquareIsMonotoneAlongDiagonalAndObeysAreaLaw) {
  const auto g = square_grid(97, {0.0, 0.0}, 1.0);
  const auto domain = box_domain(g, 0.9, 0.9);
  const auto field = solve_arrival(domain);
  const int mid = 48;
  double prev = -1.0;
  for (int i = 0; i <= mid; ++i) {
    const double t = field.at(i, i);
    if (std::isnan(t)) continue;
    EXPECT_GE(t, prev - 1e-12);
    prev = t;
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double phi = domain.phi[k];
    if (phi < 0.0) EXPECT_GE(field.values[k], 0.0);
    if (phi > 0.0) EXPECT_TRUE(std::isnan(field.values[k]));
  }
  // Area shrinks at rate 2 pi.
  EXPECT_NEAR(field.T_hat, 3.24 / (2.0 * std::numbers::pi), 5e-3);
  EXPECT_EQ(field.T_hat, field.at(mid, mid));
}

TEST(SolveArrival, RejectsUnderResolvedDomainsAndLargeSteps) {
  const auto coarse = square_grid(40, {0.0, 0.0}, 1.1);
  EXPECT_THROW(solve_arrival(disk_domain(coarse, 1.0)), Error);
  const auto g = square_grid(97, {0.0, 0.0}, 1.1);
  ArrivalControls c;
  c.dt_factor = 0.3;
  try {
    solve_arrival(disk_domain(g, 1.0), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::step_rejected);
  }
}

TEST(ArrivalFromTrajectory, CircleMatchesBallSolution) {
  const auto initial = circle_support(64, 1.0);
  const auto traj = run_to_extinction(initial);
  const auto g = square_grid(41, {0.0, 0.0}, 1.0);
  const auto field = arrival_from_trajectory(initial, traj, g);
  int defined = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = field.at(i, j);
      if (std::isnan(t)) continue;
      ++defined;
      const Vec2 p = g.node(i, j);
      EXPECT_NEAR(t, 0.5 - 0.5 * (p[0] * p[0] + p[1] * p[1]), 1e-7);
    }
  }
  EXPECT_GT(defined, 1000);
}

TEST(AsymptoticResidual, SyntheticQuarticField) {
  const auto g = square_grid(401, {0.0, 0.0}, 0.5);
  const auto field = tabulate_arrival(g, [](Vec2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return 0.7 - 0.5 * r2 + r2 * r2;
  });
  const auto rep = asymptotic_residual(field, 0.7, {0.0, 0.0}, 4);
  EXPECT_FALSE(rep.at_floor);
  EXPECT_GE(rep.exponents.size(), 2u);
  EXPECT_NEAR(rep.fitted_exponent, 4.0, 0.1);
  // The innermost annulus holds few nodes, so its maximum sits inside the outer edge.
  for (const auto& e : rep.exponents) EXPECT_NEAR(e.exponent, 4.0, 0.2);
}

TEST(AsymptoticResidual, ExactBallIsAtFloor) {
  const auto g = square_grid(201, {0.0, 0.0}, 1.0);
  const auto field = tabulate_arrival(g, [](Vec2 x) { return 0.5 - 0.5 * (x[0] * x[0] + x[1] * x[1]); });
  const auto rep = asymptotic_residual(field, 0.5, {0.0, 0.0}, 3);
  EXPECT_TRUE(rep.at_floor);
  EXPECT_TRUE(rep.exponents.empty());
  EXPECT_TRUE(std::isnan(rep.fitted_exponent));
}

TEST(AsymptoticResidual, PartialWhenAnnuliLeaveTheField) {
  const auto g = square_grid(201, {0.0, 0.0}, 1.0);
  const auto field = tabulate_arrival(g, [](Vec2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return r2 > 0.25 ? std::nan("") : 0.5 - 0.5 * r2 + r2 * r2 * r2;
  });
  const auto rep = asymptotic_residual(field, 0.5, {0.0, 0.0}, 6);
  EXPECT_TRUE(rep.partial);
  EXPECT_NEAR(rep.fitted_exponent, 6.0, 0.2);
  EXPECT_THROW(asymptotic_residual(field, 0.5, {0.0, 0.0}, 2), Error);
}

}  // namespace
