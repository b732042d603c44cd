#pragma once

// Range synthesis and weighted least-squares lateration by Newton-Raphson
// (Gauss-Newton) iteration on the linearized distance model.

#include "coloc/rng.hpp"
#include "coloc/topology.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace coloc {

struct RangeMeasurementSet {
  std::vector<double> measured;       // rho_k
  std::vector<double> sigma;          // per-link standard deviation, > 0
  std::vector<double> true_distance;  // r_k; empty when ranges came from a file

  std::size_t size() const { return measured.size(); }
};

// rho_k = r_k + eps_k with eps_k ~ N(0, sigma^2), i.i.d. across links.
RangeMeasurementSet synthesize_measurements(const NetworkTopology& topology, const NodePositions& positions,
                                            double sigma, Rng& rng);

struct SolverOptions {
  std::size_t max_iter = 50;
  double step_tol = 1e-10;
};

enum class SolverStatus { Converged, MaxIterations, Singular, Diverged, Degenerate };

std::string to_string(SolverStatus status);

struct SolverResult {
  Eigen::VectorXd estimate;  // column{p_1, ..., p_NS}, length d*N_S
  std::size_t iterations = 0;
  bool converged = false;
  SolverStatus status = SolverStatus::MaxIterations;
  double residual_norm = 0.0;  // ||rho - r(p)|| at the returned estimate
  std::vector<double> step_norms;

  // Estimate reshaped to d x N_S.
  Eigen::MatrixXd sensor_matrix(int dim) const;
};

// Iterates p <- p + (G^T S^-1 G)^-1 G^T S^-1 (rho - r(p)), rebuilding G at
// every iterate, until the step norm drops to step_tol. A rank-deficient normal
// matrix, a zero-length link or a runaway iterate ends the run with the
// matching status rather than an exception.
SolverResult solve_wls(const NetworkTopology& topology, const Eigen::MatrixXd& anchor_coords,
                       const RangeMeasurementSet& measurements, const Eigen::MatrixXd& initial_sensors,
                       const SolverOptions& opts = {});

struct CovarianceEstimate {
  Eigen::MatrixXd covariance;  // sample covariance of p_hat - p_true
  Eigen::VectorXd mean_error;
  std::size_t used_trials = 0;
  std::size_t failed_trials = 0;
};

// Monte-Carlo covariance of lateration error. Each trial draws fresh noise on
// its own stream derived from (seed, trial) and starts from the true positions.
// Failed trials are counted and left out.
CovarianceEstimate empirical_error_covariance(const NetworkTopology& topology, const NodePositions& truth,
                                              double sigma, std::size_t trials, std::uint64_t seed,
                                              const SolverOptions& opts = {}, unsigned threads = 0);

}  // namespace coloc
