#pragma once

// Dilution-of-precision mathematics for range-based cooperative localization.
//
// The geometry matrix G (K x d*N_S) is the Jacobian of link lengths with
// respect to sensor coordinates. F = G^T G, and the DOP matrix is H = F^{-1}.
// GDOP is tr(H) and AGDOP is tr(H)/N_S; no square root is taken anywhere in
// this library.

#include "coloc/rng.hpp"
#include "coloc/topology.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace coloc {

// F is singular when lambda_min <= kSingularRelativeEigenvalue * lambda_max.
inline constexpr double kSingularRelativeEigenvalue = 1e-10;

class GeometryMatrix {
 public:
  struct Row {
    // +direction lands in the head sensor's column block, -direction in the
    // tail's. An anchor endpoint contributes no block.
    std::optional<std::size_t> head_sensor;
    std::optional<std::size_t> tail_sensor;
    Eigen::VectorXd direction;  // unit vector from tail to head
  };

  GeometryMatrix(int dim, std::size_t n_sensors, std::vector<Row> rows);

  int dim() const { return dim_; }
  std::size_t n_sensors() const { return n_sensors_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return static_cast<std::size_t>(dim_) * n_sensors_; }
  const std::vector<Row>& row_data() const { return rows_; }

  Eigen::MatrixXd dense() const;
  // F = G^T G accumulated from the row blocks.
  Eigen::MatrixXd normal_matrix() const;
  // G^T W G for per-row weights.
  Eigen::MatrixXd weighted_normal_matrix(std::span<const double> weights) const;
  // G^T W y.
  Eigen::VectorXd weighted_transpose_times(std::span<const double> weights, const Eigen::VectorXd& y) const;

 private:
  int dim_;
  std::size_t n_sensors_;
  std::vector<Row> rows_;
};

// Row k: head = the link's first endpoint i_k, tail = j_k, direction
// (p_i - p_j)/r. Throws ComputationError naming the link when r == 0.
GeometryMatrix build_geometry_matrix(const NetworkTopology& topology, const NodePositions& positions);

struct DopReport {
  int dim = 0;
  std::size_t n_sensors = 0;
  bool singular = true;
  // Unset (empty / infinite) when singular.
  Eigen::VectorXd per_coord_dop;
  double gdop = std::numeric_limits<double>::infinity();
  double agdop = std::numeric_limits<double>::infinity();
  // lambda_max / lambda_min of F; infinite when lambda_min <= 0.
  double condition_estimate = std::numeric_limits<double>::infinity();
};

// Singularity is reported, never thrown.
DopReport compute_dop(const GeometryMatrix& g);
DopReport dop_from_normal_matrix(const Eigen::MatrixXd& f, int dim);
DopReport compute_dop(const NetworkTopology& topology, const NodePositions& positions);

// Per-coordinate factor of E[F | links]: deg(i)/d on the diagonal, -1/d for
// each sensor-sensor link. Equals the anchor-deleted graph Laplacian over d.
Eigen::MatrixXd conditional_expectation_xi(const NetworkTopology& topology, int dim);
// Xi_check (x) I_d, with the coordinate index varying fastest.
Eigen::MatrixXd kronecker_identity(const Eigen::MatrixXd& xi_check, int dim);
// Anchor-deleted graph Laplacian (N_S x N_S).
Eigen::MatrixXd reduced_laplacian(const NetworkTopology& topology);

// E over uniformly random sensor links of Xi_check: delta/d on the diagonal,
// -delta_s/(d(N_S-1)) elsewhere.
Eigen::MatrixXd expected_fcheck(std::size_t n_sensors, double degree, double sensor_degree, int dim);

struct ConnectivityBound {
  double lb_e_agdop = std::numeric_limits<double>::infinity();
  double eta = 0.0;
  double zeta = 0.0;
  int dim = 2;
  std::size_t n_sensors = 0;
  double sensor_degree = 0.0;
  double anchor_degree = 0.0;

  bool finite() const { return lb_e_agdop < std::numeric_limits<double>::infinity(); }
};

// Closed-form lower bound on expected AGDOP from connectivity alone:
//   (d^2/delta) * (N_S - 1 + delta_s/delta_a) / (N_S - 1 + delta_s/delta),
// with the N_S = 1 case reduced to d^2/delta_a. Infinite when delta_a == 0.
ConnectivityBound lb_e_agdop(std::size_t n_sensors, double sensor_degree, double anchor_degree, int dim);

// The same bound by dense numerical inversion of expected_fcheck. Throws
// ComputationError when that matrix is singular (delta_a == 0).
double lb_via_direct_inverse(std::size_t n_sensors, double sensor_degree, double anchor_degree, int dim);

// E-AGDOP is likely infinite when the bound exceeds d^2/(d+2).
double practical_connectivity_threshold(int dim);
bool likely_infinite_eagdop(double lb, int dim);

// (I - u u^T)^{-1} = I + u u^T / (1 - u^T u). Requires u^T u != 1.
Eigen::MatrixXd identity_minus_rank_one_inverse(const Eigen::VectorXd& u);

// One sensor in the plane with anchors at the given bearings:
// N_A / sum_{i<j} sin^2(theta_j - theta_i). Infinite when the sum vanishes.
double single_sensor_gdop(std::span<const double> angles);

struct PsdGapResult {
  double min_eigenvalue = 0.0;
  Eigen::MatrixXd gap;  // mean(F^-1) - mean(F)^-1
};

// Sample check of E[F^-1] >= (E F)^-1. Throws ComputationError listing the
// indices of any non-invertible sample.
PsdGapResult psd_gap_check(std::span<const Eigen::MatrixXd> samples);

// Standard error of the gap's minimum eigenvalue by nonparametric bootstrap.
double psd_gap_bootstrap_se(std::span<const Eigen::MatrixXd> samples, std::size_t resamples, Rng& rng);

}  // namespace coloc
