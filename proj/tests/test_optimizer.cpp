#include "doctest.h"

#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace coloc;

namespace {

double angle_deg(const NodePositions& p, std::size_t at, std::size_t a, std::size_t b) {
  const Eigen::VectorXd u = p.at(a) - p.at(at), v = p.at(b) - p.at(at);
  return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

OptimizerOptions quick(std::size_t restarts) {
  OptimizerOptions o;
  o.restarts = restarts;
  o.threads = 1;
  return o;
}

}  // namespace

TEST_CASE("nelder_mead minimizes a quadratic and a banana") {
  NelderMeadOptions o;
  o.max_evals = 20000;
  const auto q = nelder_mead(
      [](const std::vector<double>& x) { return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2); }, {0, 0}, o);
  CHECK(q.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(q.x[1] == doctest::Approx(-2.0).epsilon(1e-5));
  const auto r = nelder_mead(
      [](const std::vector<double>& x) {
        return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
      },
      {-1.2, 1.0}, o);
  CHECK(r.value < 1e-10);
}

TEST_CASE("nelder_mead tolerates infinite regions") {
  NelderMeadOptions o;
  const auto r = nelder_mead(
      [](const std::vector<double>& x) {
        if (x[0] < 0.5) return std::numeric_limits<double>::infinity();
        return (x[0] - 2) * (x[0] - 2);
      },
      {1.0}, o);
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("optimal single-sensor angles") {
  const auto a3 = optimal_single_sensor_angles(3);
  REQUIRE(a3.size() == 3);
  CHECK(a3[2] == doctest::Approx(2 * std::numbers::pi));
  CHECK(single_sensor_gdop(a3) == doctest::Approx(4.0 / 3.0));
  CHECK(single_sensor_gdop(optimal_single_sensor_angles(4)) == doctest::Approx(1.0));
  CHECK(std::isinf(single_sensor_gdop(optimal_single_sensor_angles(2))));
}

TEST_CASE("star with three anchors reaches 4/3 with lines 60 degrees apart") {
  // Only the lines through the sensor matter, so an anchor may sit on either
  // side: 120 degree spacing shows up as 60 or 120 between rays.
  const auto r = minimize_agdop({star_topology(3), 2}, quick(8), 1);
  CHECK(std::abs(r.best_agdop - 4.0 / 3.0) < 1e-3);
  const auto& p = r.best_positions;
  for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    const double ang = angle_deg(p, 0, a, b);
    CHECK(std::min(ang, 180.0 - ang) == doctest::Approx(60.0).epsilon(1e-3));
  }
}

TEST_CASE("reference cases sit above their bounds") {
  const double expected[] = {1.633, 1.124, 2.667, 1.313};
  for (int c = 1; c <= 4; ++c) {
    CAPTURE(c);
    const auto topo = reference_case_topology(c);
    const auto r = minimize_agdop({topo, 2}, quick(16), 7);
    const auto deg = degree_summary(topo);
    const double lb = lb_e_agdop(topo.n_sensors(), deg.avg_sensor_degree, deg.avg_anchor_degree, 2).lb_e_agdop;
    CHECK(r.best_agdop >= lb);
    CHECK(std::abs(r.best_agdop - expected[c - 1]) < 0.01);
  }
}

TEST_CASE("case 4 optimum opens each sensor's anchor pair at about 104 degrees") {
  const auto r = minimize_agdop({reference_case_topology(4), 2}, quick(16), 7);
  // Sensor s links to anchors 3 + 2s and 4 + 2s.
  for (std::size_t s = 0; s < 3; ++s) CHECK(angle_deg(r.best_positions, s, 3 + 2 * s, 4 + 2 * s) == doctest::Approx(104.15).epsilon(2e-3));
}

TEST_CASE("gauge and similarity invariance of the returned geometry") {
  const auto topo = reference_case_topology(1);
  const auto r = minimize_agdop({topo, 2}, quick(4), 3);
  const auto& p = r.best_positions;
  CHECK(p.col(0).norm() < 1e-15);
  CHECK(p.col(1)[0] == doctest::Approx(1.0));
  CHECK(std::abs(p.col(1)[1]) < 1e-15);
  CHECK(agdop_objective(topo, p) == doctest::Approx(r.best_agdop).epsilon(1e-12));

  Eigen::Matrix2d rot;
  rot << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
  Eigen::MatrixXd moved = 0.37 * rot * p.matrix();
  moved.colwise() += Eigen::Vector2d(4, -1);
  CHECK(std::abs(agdop_objective(topo, NodePositions(moved)) - r.best_agdop) < 1e-10);
}

TEST_CASE("repeatable for a fixed seed and independent of threads") {
  const auto topo = reference_case_topology(2);
  auto o1 = quick(6);
  auto o2 = quick(6);
  o2.threads = 3;
  const auto a = minimize_agdop({topo, 2}, o1, 11);
  const auto b = minimize_agdop({topo, 2}, o1, 11);
  const auto c = minimize_agdop({topo, 2}, o2, 11);
  CHECK(std::abs(a.best_agdop - b.best_agdop) < 1e-12);
  CHECK(a.best_agdop == c.best_agdop);
  CHECK(a.restart_agdop == c.restart_agdop);
}

TEST_CASE("too few links is an input error") {
  CHECK_THROWS_AS(minimize_agdop({star_topology(1), 2}, quick(2), 1), InputError);
  CHECK_THROWS_AS(reference_case_topology(5), InputError);
}

TEST_CASE("all-singular topology is a computation error") {
  // Enough links to pass the count check but an isolated sensor keeps F singular.
  const NetworkTopology t(2, 4, {{0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CHECK_THROWS_AS(minimize_agdop({t, 2}, quick(2), 1), ComputationError);
}
