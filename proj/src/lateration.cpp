#include "coloc/lateration.hpp"

#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/parallel.hpp"

#include <cmath>
#include <optional>

namespace coloc {

namespace {

// Runaway detection, in unit-square units.
constexpr double kDivergenceStepFactor = 10.0;
constexpr double kCoordinateLow = -10.0;
constexpr double kCoordinateHigh = 11.0;

NodePositions assemble(const Eigen::MatrixXd& sensors, const Eigen::MatrixXd& anchors) {
  Eigen::MatrixXd all(sensors.rows(), sensors.cols() + anchors.cols());
  all << sensors, anchors;
  return NodePositions(std::move(all));
}

Eigen::VectorXd link_lengths(const NetworkTopology& topology, const NodePositions& pos) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(topology.n_links()));
  for (std::size_t k = 0; k < topology.n_links(); ++k) {
    const Link& link = topology.links()[k];
    r[static_cast<Eigen::Index>(k)] = pos.distance(link.a, link.b);
  }
  return r;
}

}  // namespace

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max-iterations";
    case SolverStatus::Singular: return "singular";
    case SolverStatus::Diverged: return "diverged";
    case SolverStatus::Degenerate: return "zero-distance";
  }
  return "unknown";
}

Eigen::MatrixXd SolverResult::sensor_matrix(int dim) const {
  return Eigen::Map<const Eigen::MatrixXd>(estimate.data(), dim, estimate.size() / dim);
}

RangeMeasurementSet synthesize_measurements(const NetworkTopology& topology, const NodePositions& positions,
                                            double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw InputError("range noise sigma must be > 0");
  if (positions.n_nodes() != topology.n_nodes()) throw InputError("position count does not match node count");
  RangeMeasurementSet out;
  out.true_distance.reserve(topology.n_links());
  for (const auto& link : topology.links()) {
    const double r = positions.distance(link.a, link.b);
    out.true_distance.push_back(r);
    out.measured.push_back(r + sigma * rng.normal());
    out.sigma.push_back(sigma);
  }
  return out;
}

SolverResult solve_wls(const NetworkTopology& topology, const Eigen::MatrixXd& anchor_coords,
                       const RangeMeasurementSet& measurements, const Eigen::MatrixXd& initial_sensors,
                       const SolverOptions& opts) {
  const int dim = static_cast<int>(initial_sensors.rows());
  if (static_cast<std::size_t>(initial_sensors.cols()) != topology.n_sensors() ||
      static_cast<std::size_t>(anchor_coords.cols()) != topology.n_anchors() ||
      (anchor_coords.cols() > 0 && anchor_coords.rows() != dim))
    throw InputError("initial guess or anchor coordinates do not match the topology");
  if (measurements.size() != topology.n_links() || measurements.sigma.size() != topology.n_links())
    throw InputError("measurement count does not match link count");

  std::vector<double> weights(measurements.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(measurements.sigma[k] > 0.0)) throw InputError("range noise sigma must be > 0");
    weights[k] = 1.0 / (measurements.sigma[k] * measurements.sigma[k]);
  }
  const Eigen::VectorXd rho = Eigen::Map<const Eigen::VectorXd>(measurements.measured.data(),
                                                                static_cast<Eigen::Index>(measurements.size()));

  SolverResult result;
  NodePositions pos = assemble(initial_sensors, anchor_coords);
  const auto n_sensor_coords = static_cast<Eigen::Index>(dim * topology.n_sensors());
  auto current_estimate = [&] {
    return Eigen::Map<const Eigen::VectorXd>(pos.matrix().data(), n_sensor_coords).eval();
  };
  result.estimate = current_estimate();
  result.residual_norm = (rho - link_lengths(topology, pos)).norm();

  if (topology.n_links() < static_cast<std::size_t>(n_sensor_coords)) {
    result.status = SolverStatus::Singular;
    return result;
  }

  const double step_limit = kDivergenceStepFactor * std::sqrt(static_cast<double>(dim));
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    std::optional<GeometryMatrix> g;
    try {
      g.emplace(build_geometry_matrix(topology, pos));
    } catch (const ComputationError&) {
      result.status = SolverStatus::Degenerate;
      return result;
    }
    const Eigen::MatrixXd normal = g->weighted_normal_matrix(weights);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (!(hi > 0.0) || lo <= kSingularRelativeEigenvalue * hi || ldlt.info() != Eigen::Success) {
      result.status = SolverStatus::Singular;
      return result;
    }
    const Eigen::VectorXd residual = rho - link_lengths(topology, pos);
    const Eigen::VectorXd step = ldlt.solve(g->weighted_transpose_times(weights, residual));
    const double step_norm = step.norm();
    result.step_norms.push_back(step_norm);
    result.iterations = it + 1;

    Eigen::Map<Eigen::VectorXd>(pos.matrix().data(), n_sensor_coords) += step;
    result.estimate = current_estimate();
    result.residual_norm = (rho - link_lengths(topology, pos)).norm();

    const bool out_of_range = (result.estimate.array() < kCoordinateLow).any() ||
                              (result.estimate.array() > kCoordinateHigh).any();
    if (!std::isfinite(step_norm) || step_norm > step_limit || out_of_range) {
      result.status = SolverStatus::Diverged;
      return result;
    }
    if (step_norm <= opts.step_tol) {
      result.converged = true;
      result.status = SolverStatus::Converged;
      return result;
    }
  }
  result.status = SolverStatus::MaxIterations;
  return result;
}

CovarianceEstimate empirical_error_covariance(const NetworkTopology& topology, const NodePositions& truth,
                                              double sigma, std::size_t trials, std::uint64_t seed,
                                              const SolverOptions& opts, unsigned threads) {
  if (trials < 2) throw InputError("covariance estimation needs at least two trials");
  const int dim = truth.dim();
  const auto ns = static_cast<Eigen::Index>(topology.n_sensors());
  const Eigen::MatrixXd truth_sensors = truth.matrix().leftCols(ns);
  const Eigen::MatrixXd anchors = truth.matrix().rightCols(static_cast<Eigen::Index>(topology.n_anchors()));
  const Eigen::VectorXd truth_vec = Eigen::Map<const Eigen::VectorXd>(truth_sensors.data(), dim * ns);

  std::vector<Eigen::VectorXd> errors(trials);
  std::vector<char> ok(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);
    const auto meas = synthesize_measurements(topology, truth, sigma, rng);
    const auto res = solve_wls(topology, anchors, meas, truth_sensors, opts);
    if (!res.converged) return;
    errors[t] = res.estimate - truth_vec;
    ok[t] = 1;
  });

  CovarianceEstimate out;
  const Eigen::Index n = dim * ns;
  out.mean_error = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < trials; ++t) {
    if (!ok[t]) {
      ++out.failed_trials;
      continue;
    }
    out.mean_error += errors[t];
    ++out.used_trials;
  }
  if (out.used_trials < 2) throw ComputationError("fewer than two lateration trials converged");
  out.mean_error /= static_cast<double>(out.used_trials);
  out.covariance = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < trials; ++t) {
    if (!ok[t]) continue;
    const Eigen::VectorXd c = errors[t] - out.mean_error;
    out.covariance.noalias() += c * c.transpose();
  }
  out.covariance /= static_cast<double>(out.used_trials - 1);
  return out;
}

}  // namespace coloc
