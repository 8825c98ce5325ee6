#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mcflab/rescale_graph.hpp"

namespace {

using namespace mcflab;

TEST(Rescale, CircleAtExtinctionGaugeIsStationarySphere) {
  const auto shape = circle_support(64, 0.3, {1.0, 2.0});
  const auto b = rescale_snapshot(shape, 0.045, {1.0, 2.0});
  EXPECT_NEAR(b.s, -std::log(0.045), 1e-15);
  for (double h : b.support.h) EXPECT_NEAR(h, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(hausdorff_to_circle(b, std::sqrt(2.0)), 0.0, 1e-13);
  EXPECT_THROW(rescale_snapshot(shape, 0.0, {0.0, 0.0}), Error);
  try {
    rescale_with_gauge(shape, Gauge{0.0, {0.0, 0.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(ExtractGraph, OffCenterCircleRadialFunction) {
  const double a = 1.5;
  const Vec2 c{0.1, -0.05};
  SupportFunction shape = circle_support(128, a, c);
  RescaledBoundary b;
  b.support = shape;
  const auto grid = SphereGrid::circle(64);
  const auto g = extract_graph(b, grid, grid.capacity());
  for (int j = 0; j < grid.nodes(); ++j) {
    const double t = grid.angle(j);
    const double along = c[0] * std::cos(t) + c[1] * std::sin(t);
    const double cross = c[0] * std::sin(t) - c[1] * std::cos(t);
    const double rho = along + std::sqrt(a * a - cross * cross);
    EXPECT_NEAR(g.u[j], rho - std::sqrt(2.0), 1e-10);
  }
}

TEST(ExtractGraph, EllipseRadialFunction) {
  const double a = 1.6, bb = 1.3;
  RescaledBoundary b;
  b.support = ellipse_support(256, a, bb);
  const auto grid = SphereGrid::circle(64);
  const auto g = extract_graph(b, grid, grid.capacity());
  for (int j = 0; j < grid.nodes(); ++j) {
    const double t = grid.angle(j);
    const double rho = 1.0 / std::sqrt(std::pow(std::cos(t) / a, 2) + std::pow(std::sin(t) / bb, 2));
    EXPECT_NEAR(g.u[j], rho - std::sqrt(2.0), 1e-8);
  }
}

TEST(ExtractGraph, RejectsOriginOutsideTheCurve) {
  RescaledBoundary b;
  b.support = circle_support(64, 1.0, {3.0, 0.0});
  try {
    extract_graph(b, SphereGrid::circle(32));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_star_shaped);
  }
}

TEST(ExponentMap, ValuesAndInverse) {
  EXPECT_EQ(decay_exponent_map(3), 0.5);
  EXPECT_EQ(decay_exponent_map(4), 1.0);
  EXPECT_EQ(decay_exponent_map(10), 4.0);
  EXPECT_THROW(decay_exponent_map(2), Error);
  for (int n = 3; n < 10; ++n) EXPECT_EQ(order_from_rate(decay_exponent_map(n)), n);
}

TEST(GraphTrajectory, ExactGaugeCircleIsFlatAndMisGaugeGrows) {
  const auto traj = run_to_extinction(circle_support(64, 1.0));
  const auto grid = SphereGrid::circle(32);
  const auto flat = build_graph_trajectory(traj, grid, Gauge{0.5, {0.0, 0.0}});
  ASSERT_FALSE(flat.snapshots.empty());
  EXPECT_TRUE(flat.omitted_s.empty());
  // A fixed time-stepping offset in the remaining time grows like e^s through l = 0.
  for (const auto& g : flat.snapshots) EXPECT_LT(sobolev_norm(g.coeffs, 2), 1e-13 * std::exp(g.s));
  EXPECT_EQ(flat.l0_track.size(), flat.snapshots.size());

  const auto shifted = build_graph_trajectory(traj, grid, Gauge{0.5 + 1e-6, {0.0, 0.0}});
  const double early = std::abs(shifted.l0_track[20].block.cos_part);
  const double late = std::abs(shifted.l0_track[120].block.cos_part);
  const double ds = shifted.l0_track[120].s - shifted.l0_track[20].s;
  EXPECT_NEAR(std::log(late / early) / ds, 1.0, 0.05);
}

TEST(GraphTrajectory, SnapshotsPastGaugeTimeAreSkipped) {
  const auto traj = run_to_extinction(circle_support(64, 1.0));
  const auto g = build_graph_trajectory(traj, SphereGrid::circle(32), Gauge{0.49, {0.0, 0.0}});
  for (const auto& snap : g.snapshots) EXPECT_LT(snap.s, -std::log(1e-9));
  EXPECT_LT(g.snapshots.size(), traj.snapshots.size());
}

}  // namespace
