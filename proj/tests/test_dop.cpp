#include "doctest.h"

#include "fixtures.hpp"

#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/randgraph.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace coloc;

namespace {

constexpr double kPi = std::numbers::pi;

// One sensor at the origin with anchors on the unit circle at the given angles.
NetworkInstance bearing_instance(const std::vector<double>& angles) {
  const std::size_t na = angles.size();
  std::vector<Link> links;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(na + 1));
  for (std::size_t i = 0; i < na; ++i) {
    links.emplace_back(0, i + 1);
    m(0, static_cast<Eigen::Index>(i + 1)) = std::cos(angles[i]);
    m(1, static_cast<Eigen::Index>(i + 1)) = std::sin(angles[i]);
  }
  return {NetworkTopology(1, na, links), NodePositions(m)};
}

// Trace of the inverse normal matrix by LU on the dense G, independent of the
// library's eigen/Cholesky path.
double oracle_agdop(const NetworkInstance& inst) {
  const Eigen::MatrixXd g = build_geometry_matrix(inst.topology, inst.positions).dense();
  const Eigen::MatrixXd f = g.transpose() * g;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  return lu.inverse().trace() / static_cast<double>(inst.topology.n_sensors());
}

GraphModelSpec erg_spec(double p, std::size_t ns) {
  GraphModelSpec s;
  s.model = ErdosRenyi{p};
  s.n_sensors = ns;
  s.n_anchors = 4;
  return s;
}

}  // namespace

TEST_CASE("geometry matrix of the path network") {
  const auto g = build_geometry_matrix(fixtures::path_topology(), fixtures::path_positions()).dense();
  Eigen::MatrixXd expected(3, 6);
  expected << 1, 0, -1, 0, 0, 0,
              0, 0, 0, -1, 0, 1,
              0, 0, 0, 0, -1, 0;
  CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("one-link geometry matrix") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1,
       0, 0;
  const auto g = build_geometry_matrix(NetworkTopology(1, 1, {{0, 1}}), NodePositions(m)).dense();
  REQUIRE(g.rows() == 1);
  CHECK(g(0, 0) == -1.0);
  CHECK(g(0, 1) == 0.0);
}

TEST_CASE("zero-length link is an error naming the link") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  try {
    build_geometry_matrix(NetworkTopology(1, 1, {{0, 1}}), NodePositions(m));
    FAIL("expected an exception");
  } catch (const ComputationError& e) {
    CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
  }
}

TEST_CASE("row blocks of G have unit norm") {
  for (int t = 0; t < 50; ++t) {
    Rng rng = Rng::stream(17, t);
    const auto inst = generate(erg_spec(0.5, 8), rng);
    const auto g = build_geometry_matrix(inst.topology, inst.positions);
    for (const auto& row : g.row_data()) CHECK(row.direction.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Eigen::MatrixXd dense = g.dense();
    for (std::size_t k = 0; k < inst.topology.n_links(); ++k) {
      const auto& l = inst.topology.links()[k];
      for (std::size_t node : {l.a, l.b})
        if (inst.topology.is_sensor(node))
          CHECK(dense.row(static_cast<Eigen::Index>(k)).segment(static_cast<Eigen::Index>(2 * node), 2).norm() ==
                doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("single-sensor DOP examples") {
  SUBCASE("cross") {
    const auto inst = bearing_instance({0, kPi / 2, kPi, 3 * kPi / 2});
    const auto r = compute_dop(inst.topology, inst.positions);
    CHECK_FALSE(r.singular);
    CHECK(r.agdop == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("right angle") {
    const auto inst = bearing_instance({0, kPi / 2});
    CHECK(compute_dop(inst.topology, inst.positions).gdop == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("collinear") {
    const auto inst = bearing_instance({0, 0, kPi});
    const auto r = compute_dop(inst.topology, inst.positions);
    CHECK(r.singular);
    CHECK(std::isinf(r.agdop));
    CHECK(r.per_coord_dop.size() == 0);
  }
  SUBCASE("center of the corner square") {
    const auto r = compute_dop(fixtures::corner_star(), fixtures::corner_star_positions());
    CHECK(r.agdop == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("compute_dop agrees with an LU oracle") {
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng::stream(23, t);
    const auto inst = generate(erg_spec(0.6, 2 + t % 10), rng);
    const auto r = compute_dop(inst.topology, inst.positions);
    const double oracle = oracle_agdop(inst);
    if (r.singular) continue;
    CHECK(r.agdop == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(r.gdop == doctest::Approx(r.per_coord_dop.sum()).epsilon(1e-12));
  }
}

TEST_CASE("large networks use per-column solves with the same answer") {
  Rng rng(31);
  GraphModelSpec s;
  s.model = Geometric{0.15};
  s.n_sensors = 300;  // d*N_S = 600 > 512
  s.n_anchors = 4;
  const auto inst = generate(s, rng);
  const auto r = compute_dop(inst.topology, inst.positions);
  REQUIRE_FALSE(r.singular);
  CHECK(r.agdop == doctest::Approx(oracle_agdop(inst)).epsilon(1e-7));
}

TEST_CASE("AGDOP is invariant under similarity transforms") {
  Rng rng(41);
  const auto inst = generate(erg_spec(0.7, 6), rng);
  const double base = compute_dop(inst.topology, inst.positions).agdop;
  Eigen::Matrix2d rot;
  const double a = 0.83;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  Eigen::MatrixXd moved = 3.7 * rot * inst.positions.matrix();
  moved.colwise() += Eigen::Vector2d(-2.0, 5.0);
  CHECK(compute_dop(inst.topology, NodePositions(moved)).agdop == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("conditional expectation of F for the path network") {
  const auto xi = conditional_expectation_xi(fixtures::path_topology(), 2);
  Eigen::Matrix3d expected;
  expected << 0.5, -0.5, 0,
              -0.5, 1, -0.5,
              0, -0.5, 1;
  CHECK(xi == Eigen::MatrixXd(expected));

  Eigen::MatrixXd full(6, 6);
  full << 0.5, 0, -0.5, 0, 0, 0,
          0, 0.5, 0, -0.5, 0, 0,
          -0.5, 0, 1, 0, -0.5, 0,
          0, -0.5, 0, 1, 0, -0.5,
          0, 0, -0.5, 0, 1, 0,
          0, 0, 0, -0.5, 0, 1;
  CHECK(kronecker_identity(xi, 2) == full);
}

TEST_CASE("isolated sensor has a zero row in the conditional expectation") {
  const auto xi = conditional_expectation_xi(NetworkTopology(3, 1, {{0, 1}, {0, 3}}), 2);
  CHECK(xi.row(2).cwiseAbs().sum() == 0.0);
  CHECK(xi.col(2).cwiseAbs().sum() == 0.0);
}

TEST_CASE("trace and Laplacian identities on random topologies") {
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng::stream(5, t);
    const auto inst = generate(erg_spec(0.4, 3 + t % 12), rng);
    const auto& topo = inst.topology;
    const auto xi = conditional_expectation_xi(topo, 2);
    const auto deg = degree_summary(topo);
    CHECK(xi.trace() == doctest::Approx(double(topo.n_sensors()) * deg.avg_degree / 2.0).epsilon(1e-13));

    // Full Laplacian built here, then the anchor block deleted.
    const auto n = static_cast<Eigen::Index>(topo.n_nodes());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const auto& l : topo.links()) {
      const auto a = static_cast<Eigen::Index>(l.a), b = static_cast<Eigen::Index>(l.b);
      lap(a, a) += 1;
      lap(b, b) += 1;
      lap(a, b) -= 1;
      lap(b, a) -= 1;
    }
    const auto ns = static_cast<Eigen::Index>(topo.n_sensors());
    CHECK((reduced_laplacian(topo) - lap.topLeftCorner(ns, ns)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((xi - lap.topLeftCorner(ns, ns) / 2.0).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("expected F-check") {
  SUBCASE("path-network degrees") {
    const auto f = expected_fcheck(3, 5.0 / 3.0, 4.0 / 3.0, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(f(i, j) == doctest::Approx(i == j ? 5.0 / 6.0 : -1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("noncooperative") {
    const auto f = expected_fcheck(5, 3.0, 0.0, 2);
    CHECK((f - 1.5 * Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two sensors") {
    // -delta_s/(d(N_S-1)) = -1/2; this matrix gives the 1.5 bound below.
    const auto f = expected_fcheck(2, 3.0, 1.0, 2);
    CHECK(f(0, 0) == 1.5);
    CHECK(f(0, 1) == -0.5);
    CHECK(2.0 * f.inverse().trace() / 2.0 == doctest::Approx(1.5));
  }
  CHECK_THROWS_AS(expected_fcheck(1, 2.0, 1.0, 2), InputError);
}

TEST_CASE("closed-form bound values") {
  CHECK(lb_e_agdop(2, 1, 2, 2).lb_e_agdop == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(lb_e_agdop(3, 2, 1, 2).lb_e_agdop == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lb_e_agdop(3, 2, 2, 2).lb_e_agdop == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(lb_e_agdop(2, 1, 3, 2).lb_e_agdop == doctest::Approx(16.0 / 15.0).epsilon(1e-12));
  CHECK(lb_e_agdop(1, 0, 4, 2).lb_e_agdop == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lb_e_agdop(16, 4, 1, 2).lb_e_agdop == doctest::Approx(0.96203).epsilon(1e-5));

  const auto b = lb_e_agdop(2, 1, 2, 2);
  CHECK(b.eta == doctest::Approx(2.0));
  CHECK(b.zeta == doctest::Approx(0.25));

  const auto inf = lb_e_agdop(3, 2, 0, 2);
  CHECK_FALSE(inf.finite());
  CHECK(std::isinf(inf.lb_e_agdop));
  CHECK_THROWS_AS(lb_e_agdop(1, 1.0, 2.0, 2), InputError);
  CHECK_THROWS_AS(lb_e_agdop(0, 1.0, 2.0, 2), InputError);
}

TEST_CASE("direct inverse matches the closed form") {
  CHECK(lb_via_direct_inverse(2, 1, 2, 2) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(lb_via_direct_inverse(3, 2, 2, 2) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(lb_via_direct_inverse(16, 4, 1, 2) == doctest::Approx(0.96203).epsilon(1e-5));
  for (std::size_t ns : {2u, 5u, 13u, 40u})
    for (double ds : {0.0, 0.5, 1.0, 3.0})
      for (double da : {0.25, 1.0, 2.5})
        for (int d : {1, 2, 3}) {
          if (ds > static_cast<double>(ns - 1)) continue;
          CHECK(std::abs(lb_e_agdop(ns, ds, da, d).lb_e_agdop - lb_via_direct_inverse(ns, ds, da, d)) < 1e-9);
        }
  CHECK_THROWS_AS(lb_via_direct_inverse(3, 2, 0, 2), ComputationError);
}

TEST_CASE("bound monotonicity and large-network limit") {
  double prev = std::numeric_limits<double>::infinity();
  for (double da = 0.25; da <= 8.0; da += 0.25) {
    const double v = lb_e_agdop(10, 3.0, da, 2).lb_e_agdop;
    CHECK(v < prev);
    prev = v;
  }
  // Fixed delta = 5 split as (4, 1): approaches d^2/delta.
  CHECK(std::abs(lb_e_agdop(1000000, 4.0, 1.0, 2).lb_e_agdop - 4.0 / 5.0) < 1e-5);
}

TEST_CASE("practical connectivity threshold") {
  CHECK(practical_connectivity_threshold(2) == 1.0);
  CHECK(practical_connectivity_threshold(3) == doctest::Approx(9.0 / 5.0));
  CHECK(likely_infinite_eagdop(1.2, 2));
  CHECK_FALSE(likely_infinite_eagdop(1.0, 2));
  CHECK(likely_infinite_eagdop(std::numeric_limits<double>::infinity(), 2));
}

TEST_CASE("rank-one inverse identity") {
  for (std::size_t n : {2u, 5u, 16u})
    for (double zeta : {0.01, 0.05, 0.9 / static_cast<double>(n)}) {
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), std::sqrt(zeta));
      const Eigen::MatrixXd m =
          Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - u * u.transpose();
      CHECK((identity_minus_rank_one_inverse(u) - m.inverse()).cwiseAbs().maxCoeff() < 1e-12);
    }
  CHECK_THROWS_AS(identity_minus_rank_one_inverse(Eigen::Vector2d(1.0, 0.0)), ComputationError);
}

TEST_CASE("single-sensor GDOP formula") {
  CHECK(single_sensor_gdop(std::vector<double>{0, 2 * kPi / 3, 4 * kPi / 3}) == doctest::Approx(4.0 / 3.0));
  CHECK(single_sensor_gdop(std::vector<double>{0, kPi / 2}) == doctest::Approx(2.0));
  CHECK(std::isinf(single_sensor_gdop(std::vector<double>{0, kPi})));

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> ang(3 + t % 6);
    for (auto& a : ang) a = rng.uniform(0, 2 * kPi);
    const auto inst = bearing_instance(ang);
    const auto r = compute_dop(inst.topology, inst.positions);
    if (!r.singular) CHECK(single_sensor_gdop(ang) == doctest::Approx(r.gdop).epsilon(1e-9));
  }
}

TEST_CASE("PSD gap") {
  SUBCASE("one sample") {
    const std::vector<Eigen::MatrixXd> s{Eigen::Matrix2d{{2, 1}, {1, 3}}};
    CHECK(std::abs(psd_gap_check(s).min_eigenvalue) < 1e-15);
  }
  SUBCASE("I and 4I") {
    const std::vector<Eigen::MatrixXd> s{Eigen::MatrixXd::Identity(2, 2), 4 * Eigen::MatrixXd::Identity(2, 2)};
    const auto r = psd_gap_check(s);
    CHECK(r.min_eigenvalue == doctest::Approx(0.225).epsilon(1e-14));
    CHECK(r.gap(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("singular sample") {
    const std::vector<Eigen::MatrixXd> s{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    try {
      psd_gap_check(s);
      FAIL("expected an exception");
    } catch (const ComputationError& e) {
      CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
  }
}

TEST_CASE("per-instance AGDOP against the bound at its own degrees") {
  // Observed, not assumed: every finite instance so far sits above the bound.
  std::size_t checked = 0;
  for (int t = 0; t < 2000; ++t) {
    Rng rng = Rng::stream(61, t);
    GraphModelSpec s = erg_spec(0.2 + 0.1 * (t % 7), 2 + t % 15);
    if (t % 3 == 1) s.anchors.placement = AnchorPlacement::UniformRandom;
    const auto inst = generate(s, rng);
    const auto r = compute_dop(inst.topology, inst.positions);
    if (r.singular) continue;
    const auto deg = degree_summary(inst.topology);
    const double lb = lb_e_agdop(s.n_sensors, deg.avg_sensor_degree, deg.avg_anchor_degree, 2).lb_e_agdop;
    CHECK(r.agdop >= lb * (1 - 1e-12));
    ++checked;
  }
  CHECK(checked > 1000);
}
