#include "coloc/dop.hpp"

#include "coloc/error.hpp"

#include <cmath>
#include <string>

namespace coloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Eigen::Index kDenseInverseLimit = 512;

Eigen::Index block_start(std::size_t sensor, int dim) {
  return static_cast<Eigen::Index>(sensor) * dim;
}

}  // namespace

GeometryMatrix::GeometryMatrix(int dim, std::size_t n_sensors, std::vector<Row> rows)
    : dim_(dim), n_sensors_(n_sensors), rows_(std::move(rows)) {}

Eigen::MatrixXd GeometryMatrix::dense() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const Row& row = rows_[k];
    const auto r = static_cast<Eigen::Index>(k);
    if (row.head_sensor) g.row(r).segment(block_start(*row.head_sensor, dim_), dim_) = row.direction.transpose();
    if (row.tail_sensor) g.row(r).segment(block_start(*row.tail_sensor, dim_), dim_) = -row.direction.transpose();
  }
  return g;
}

Eigen::MatrixXd GeometryMatrix::weighted_normal_matrix(std::span<const double> weights) const {
  const auto n = static_cast<Eigen::Index>(cols());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const Row& row = rows_[k];
    const double w = weights.empty() ? 1.0 : weights[k];
    const Eigen::MatrixXd outer = w * row.direction * row.direction.transpose();
    if (row.head_sensor) f.block(block_start(*row.head_sensor, dim_), block_start(*row.head_sensor, dim_), dim_, dim_) += outer;
    if (row.tail_sensor) f.block(block_start(*row.tail_sensor, dim_), block_start(*row.tail_sensor, dim_), dim_, dim_) += outer;
    if (row.head_sensor && row.tail_sensor) {
      const Eigen::Index h = block_start(*row.head_sensor, dim_);
      const Eigen::Index t = block_start(*row.tail_sensor, dim_);
      f.block(h, t, dim_, dim_) -= outer;
      f.block(t, h, dim_, dim_) -= outer;
    }
  }
  return f;
}

Eigen::MatrixXd GeometryMatrix::normal_matrix() const { return weighted_normal_matrix({}); }

Eigen::VectorXd GeometryMatrix::weighted_transpose_times(std::span<const double> weights,
                                                         const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols()));
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const Row& row = rows_[k];
    const double s = (weights.empty() ? 1.0 : weights[k]) * y[static_cast<Eigen::Index>(k)];
    if (row.head_sensor) out.segment(block_start(*row.head_sensor, dim_), dim_) += s * row.direction;
    if (row.tail_sensor) out.segment(block_start(*row.tail_sensor, dim_), dim_) -= s * row.direction;
  }
  return out;
}

GeometryMatrix build_geometry_matrix(const NetworkTopology& topology, const NodePositions& positions) {
  if (positions.n_nodes() != topology.n_nodes())
    throw InputError("position count " + std::to_string(positions.n_nodes()) + " does not match node count " +
                     std::to_string(topology.n_nodes()));
  std::vector<GeometryMatrix::Row> rows;
  rows.reserve(topology.n_links());
  const auto& links = topology.links();
  for (std::size_t k = 0; k < links.size(); ++k) {
    const Link& link = links[k];
    Eigen::VectorXd diff = positions.col(link.a) - positions.col(link.b);
    const double r = diff.norm();
    if (!(r > 0.0))
      throw ComputationError("zero-distance link (" + std::to_string(link.a + 1) + "," + std::to_string(link.b + 1) +
                             ") at link " + std::to_string(k + 1));
    GeometryMatrix::Row row;
    if (topology.is_sensor(link.a)) row.head_sensor = link.a;
    if (topology.is_sensor(link.b)) row.tail_sensor = link.b;
    row.direction = diff / r;
    rows.push_back(std::move(row));
  }
  return GeometryMatrix(positions.dim(), topology.n_sensors(), std::move(rows));
}

DopReport dop_from_normal_matrix(const Eigen::MatrixXd& f, int dim) {
  if (dim < 1 || f.rows() == 0 || f.rows() % dim != 0)
    throw InputError("DOP needs a non-empty normal matrix whose size is a multiple of the dimension");
  DopReport report;
  report.dim = dim;
  report.n_sensors = static_cast<std::size_t>(f.rows() / dim);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  report.condition_estimate = lo > 0.0 ? hi / lo : kInf;
  if (!(hi > 0.0) || lo <= kSingularRelativeEigenvalue * hi) return report;

  Eigen::LLT<Eigen::MatrixXd> llt(f);
  if (llt.info() != Eigen::Success) return report;

  const Eigen::Index n = f.rows();
  Eigen::VectorXd diag(n);
  if (n <= kDenseInverseLimit) {
    diag = llt.solve(Eigen::MatrixXd::Identity(n, n)).diagonal();
  } else {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      unit[c] = 1.0;
      diag[c] = llt.solve(unit)[c];
      unit[c] = 0.0;
    }
  }
  report.singular = false;
  report.per_coord_dop = diag;
  report.gdop = diag.sum();
  report.agdop = report.gdop / static_cast<double>(report.n_sensors);
  return report;
}

DopReport compute_dop(const GeometryMatrix& g) { return dop_from_normal_matrix(g.normal_matrix(), g.dim()); }

DopReport compute_dop(const NetworkTopology& topology, const NodePositions& positions) {
  return compute_dop(build_geometry_matrix(topology, positions));
}

Eigen::MatrixXd reduced_laplacian(const NetworkTopology& topology) {
  const auto ns = static_cast<Eigen::Index>(topology.n_sensors());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(ns, ns);
  for (const auto& link : topology.links()) {
    const bool sa = topology.is_sensor(link.a);
    const bool sb = topology.is_sensor(link.b);
    if (sa) lap(static_cast<Eigen::Index>(link.a), static_cast<Eigen::Index>(link.a)) += 1.0;
    if (sb) lap(static_cast<Eigen::Index>(link.b), static_cast<Eigen::Index>(link.b)) += 1.0;
    if (sa && sb) {
      lap(static_cast<Eigen::Index>(link.a), static_cast<Eigen::Index>(link.b)) -= 1.0;
      lap(static_cast<Eigen::Index>(link.b), static_cast<Eigen::Index>(link.a)) -= 1.0;
    }
  }
  return lap;
}

Eigen::MatrixXd conditional_expectation_xi(const NetworkTopology& topology, int dim) {
  if (dim < 1) throw InputError("dimension must be >= 1");
  return reduced_laplacian(topology) / static_cast<double>(dim);
}

Eigen::MatrixXd kronecker_identity(const Eigen::MatrixXd& xi_check, int dim) {
  const Eigen::Index n = xi_check.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * dim, n * dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (int m = 0; m < dim; ++m) out(i * dim + m, j * dim + m) = xi_check(i, j);
  return out;
}

Eigen::MatrixXd expected_fcheck(std::size_t n_sensors, double degree, double sensor_degree, int dim) {
  if (n_sensors == 0) throw InputError("expected F needs at least one sensor");
  if (dim < 1) throw InputError("dimension must be >= 1");
  if (!(sensor_degree >= 0.0) || !(degree >= sensor_degree))
    throw InputError("expected F needs delta >= delta_s >= 0");
  if (n_sensors < 2 && sensor_degree > 0.0)
    throw InputError("a single sensor cannot have a positive sensor degree");
  const auto n = static_cast<Eigen::Index>(n_sensors);
  const double d = static_cast<double>(dim);
  const double off = n_sensors < 2 ? 0.0 : -sensor_degree / (d * static_cast<double>(n_sensors - 1));
  Eigen::MatrixXd f = Eigen::MatrixXd::Constant(n, n, off);
  f.diagonal().setConstant(degree / d);
  return f;
}

ConnectivityBound lb_e_agdop(std::size_t n_sensors, double sensor_degree, double anchor_degree, int dim) {
  if (n_sensors == 0) throw InputError("the bound needs at least one sensor");
  if (dim < 1) throw InputError("dimension must be >= 1");
  if (!(sensor_degree >= 0.0) || !(anchor_degree >= 0.0) || !std::isfinite(sensor_degree) ||
      !std::isfinite(anchor_degree))
    throw InputError("average degrees must be finite and non-negative");
  if (n_sensors == 1 && sensor_degree > 0.0)
    throw InputError("a single sensor cannot have a positive sensor degree");

  ConnectivityBound out;
  out.dim = dim;
  out.n_sensors = n_sensors;
  out.sensor_degree = sensor_degree;
  out.anchor_degree = anchor_degree;

  const double d = static_cast<double>(dim);
  const double delta = sensor_degree + anchor_degree;
  const double m = static_cast<double>(n_sensors) - 1.0;
  if (n_sensors == 1) {
    out.eta = delta / d;
    out.zeta = 0.0;
  } else {
    out.eta = (delta + sensor_degree / m) / d;
    const double denom = delta * m + sensor_degree;
    out.zeta = denom > 0.0 ? sensor_degree / denom : 0.0;
  }
  if (!(anchor_degree > 0.0)) return out;

  if (n_sensors == 1) {
    out.lb_e_agdop = d * d / anchor_degree;
  } else {
    out.lb_e_agdop = (d * d / delta) * (m + sensor_degree / anchor_degree) / (m + sensor_degree / delta);
  }
  return out;
}

double lb_via_direct_inverse(std::size_t n_sensors, double sensor_degree, double anchor_degree, int dim) {
  const Eigen::MatrixXd f = expected_fcheck(n_sensors, sensor_degree + anchor_degree, sensor_degree, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= kSingularRelativeEigenvalue * hi)
    throw ComputationError("expected F is singular; the anchor degree must be positive");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
  const Eigen::MatrixXd inv = lu.inverse();
  return static_cast<double>(dim) * inv.trace() / static_cast<double>(n_sensors);
}

double practical_connectivity_threshold(int dim) {
  const double d = static_cast<double>(dim);
  return d * d / (d + 2.0);
}

bool likely_infinite_eagdop(double lb, int dim) { return lb > practical_connectivity_threshold(dim); }

Eigen::MatrixXd identity_minus_rank_one_inverse(const Eigen::VectorXd& u) {
  const double utu = u.squaredNorm();
  if (utu == 1.0) throw ComputationError("I - u u^T is singular when u^T u = 1");
  Eigen::MatrixXd out = u * u.transpose() / (1.0 - utu);
  out.diagonal().array() += 1.0;
  return out;
}

double single_sensor_gdop(std::span<const double> angles) {
  if (angles.size() < 2) throw InputError("single-sensor GDOP needs at least two anchors");
  double sum = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i)
    for (std::size_t j = i + 1; j < angles.size(); ++j) {
      const double s = std::sin(angles[j] - angles[i]);
      sum += s * s;
    }
  // Sums this small come from rounding of exactly collinear bearings.
  if (sum <= 1e-24 * static_cast<double>(angles.size() * angles.size())) return kInf;
  return static_cast<double>(angles.size()) / sum;
}

namespace {

struct InvertedSamples {
  std::vector<Eigen::MatrixXd> inverses;
};

InvertedSamples invert_all(std::span<const Eigen::MatrixXd> samples) {
  if (samples.empty()) throw InputError("PSD gap check needs at least one sample");
  const Eigen::Index n = samples.front().rows();
  InvertedSamples out;
  out.inverses.reserve(samples.size());
  std::string bad;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& f = samples[s];
    if (f.rows() != n || f.cols() != n) throw InputError("PSD gap samples must share one square size");
    Eigen::LLT<Eigen::MatrixXd> llt(f);
    const bool ok = llt.info() == Eigen::Success && !dop_from_normal_matrix(f, 1).singular;
    if (!ok) {
      if (!bad.empty()) bad += ",";
      bad += std::to_string(s);
      out.inverses.emplace_back();
      continue;
    }
    out.inverses.push_back(llt.solve(Eigen::MatrixXd::Identity(n, n)));
  }
  if (!bad.empty()) throw ComputationError("non-invertible samples at indices " + bad);
  return out;
}

double min_gap_eigenvalue(const Eigen::MatrixXd& mean_inverse, const Eigen::MatrixXd& mean_f, Eigen::MatrixXd* gap) {
  Eigen::MatrixXd g = mean_inverse - mean_f.inverse();
  g = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  if (gap) *gap = g;
  return eig.eigenvalues().minCoeff();
}

}  // namespace

PsdGapResult psd_gap_check(std::span<const Eigen::MatrixXd> samples) {
  const auto inv = invert_all(samples);
  const Eigen::Index n = samples.front().rows();
  Eigen::MatrixXd mean_f = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mean_inv = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    mean_f += samples[s];
    mean_inv += inv.inverses[s];
  }
  const double count = static_cast<double>(samples.size());
  mean_f /= count;
  mean_inv /= count;
  PsdGapResult out;
  out.min_eigenvalue = min_gap_eigenvalue(mean_inv, mean_f, &out.gap);
  return out;
}

double psd_gap_bootstrap_se(std::span<const Eigen::MatrixXd> samples, std::size_t resamples, Rng& rng) {
  if (resamples < 2) throw InputError("bootstrap needs at least two resamples");
  const auto inv = invert_all(samples);
  const Eigen::Index n = samples.front().rows();
  const std::size_t count = samples.size();
  std::vector<double> values;
  values.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    Eigen::MatrixXd mean_f = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd mean_inv = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < count; ++s) {
      const auto pick = static_cast<std::size_t>(rng.below(count));
      mean_f += samples[pick];
      mean_inv += inv.inverses[pick];
    }
    mean_f /= static_cast<double>(count);
    mean_inv /= static_cast<double>(count);
    values.push_back(min_gap_eigenvalue(mean_inv, mean_f, nullptr));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace coloc
