#include "coloc/optimizer.hpp"

#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/parallel.hpp"
#include "coloc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace coloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simplex_diameter(const std::vector<std::vector<double>>& vertices, std::size_t best) {
  double diam = 0.0;
  for (const auto& v : vertices) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double diff = v[i] - vertices[best][i];
      d2 += diff * diff;
    }
    diam = std::max(diam, d2);
  }
  return std::sqrt(diam);
}

struct SimplexRun {
  std::vector<double> x;
  double value;
  bool collapsed;
};

SimplexRun run_simplex(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& start,
                       double start_value, double step, double tol, std::size_t& evals, std::size_t max_evals) {
  const std::size_t n = start.size();
  const double dn = static_cast<double>(n);
  // Adaptive coefficients (Gao and Han, 2012).
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> x(n + 1, start);
  std::vector<double> fx(n + 1, start_value);
  for (std::size_t i = 0; i < n && evals < max_evals; ++i) {
    x[i + 1][i] += step;
    fx[i + 1] = f(x[i + 1]);
    ++evals;
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    return f(p);
  };

  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (simplex_diameter(x, best) <= tol) return {x[best], fx[best], true};

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += x[v][i];
    }
    for (double& c : centroid) c /= dn;

    for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + alpha * (centroid[i] - x[worst][i]);
    const double fr = eval(trial);

    if (fr < fx[best]) {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + gamma * (trial[i] - centroid[i]);
      const double fe = eval(trial2);
      if (fe < fr) {
        x[worst] = trial2;
        fx[worst] = fe;
      } else {
        x[worst] = trial;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      x[worst] = trial;
      fx[worst] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < fx[worst]) {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + rho * (trial[i] - centroid[i]);
      const double fc = eval(trial2);
      if (fc <= fr) {
        x[worst] = trial2;
        fx[worst] = fc;
        accepted = true;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] - rho * (centroid[i] - x[worst][i]);
      const double fc = eval(trial2);
      if (fc < fx[worst]) {
        x[worst] = trial2;
        fx[worst] = fc;
        accepted = true;
      }
    }
    if (accepted) continue;

    for (std::size_t v = 0; v <= n && evals < max_evals; ++v) {
      if (v == best) continue;
      for (std::size_t i = 0; i < n; ++i) x[v][i] = x[best][i] + shrink * (x[v][i] - x[best][i]);
      fx[v] = eval(x[v]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {x[best], fx[best], false};
}

// Maps node 0 to the origin and node 1 to e_1 by translation, scaling and a
// Householder reflection. Returns false when nodes 0 and 1 coincide.
bool fix_gauge(Eigen::MatrixXd& coords) {
  const Eigen::VectorXd origin = coords.col(0);
  coords.colwise() -= origin;
  const double scale = coords.col(1).norm();
  if (!(scale > 1e-12)) return false;
  coords /= scale;
  Eigen::VectorXd w = coords.col(1);
  w[0] -= 1.0;
  const double wn = w.squaredNorm();
  if (wn > 1e-24) coords -= (2.0 / wn) * w * (w.transpose() * coords);
  coords.col(1).setZero();
  coords(0, 1) = 1.0;
  return true;
}

void canonicalize_reflection(Eigen::MatrixXd& coords) {
  if (coords.rows() != 2) return;
  for (Eigen::Index n = 2; n < coords.cols(); ++n) {
    if (std::abs(coords(1, n)) > 1e-12) {
      if (coords(1, n) < 0.0) coords.row(1) *= -1.0;
      return;
    }
  }
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts) {
  NelderMeadResult out;
  if (x0.empty()) {
    out.x = std::move(x0);
    out.value = f(out.x);
    out.evals = 1;
    out.converged = true;
    return out;
  }
  std::size_t evals = 1;
  double value = f(x0);
  std::vector<double> x = std::move(x0);
  bool converged = false;
  while (evals < opts.max_evals) {
    SimplexRun run = run_simplex(f, x, value, opts.initial_step, opts.tol, evals, opts.max_evals);
    const bool improved = run.value < value - 1e-13 * std::max(1.0, std::abs(value));
    if (run.value <= value) {
      x = std::move(run.x);
      value = run.value;
    }
    converged = run.collapsed;
    if (!run.collapsed || !improved) break;
  }
  out.x = std::move(x);
  out.value = value;
  out.evals = evals;
  out.converged = converged;
  return out;
}

double agdop_objective(const NetworkTopology& topology, const NodePositions& positions) {
  const int dim = positions.dim();
  const auto n = static_cast<Eigen::Index>(dim * topology.n_sensors());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd v(dim);
  for (const auto& link : topology.links()) {
    v = positions.col(link.a) - positions.col(link.b);
    const double r = v.norm();
    if (!(r > 0.0) || !std::isfinite(r)) return kInf;
    v /= r;
    const bool sa = topology.is_sensor(link.a);
    const bool sb = topology.is_sensor(link.b);
    const Eigen::Index ia = static_cast<Eigen::Index>(link.a) * dim;
    const Eigen::Index ib = static_cast<Eigen::Index>(link.b) * dim;
    const Eigen::MatrixXd outer = v * v.transpose();
    if (sa) f.block(ia, ia, dim, dim) += outer;
    if (sb) f.block(ib, ib, dim, dim) += outer;
    if (sa && sb) {
      f.block(ia, ib, dim, dim) -= outer;
      f.block(ib, ia, dim, dim) -= outer;
    }
  }
  const DopReport report = dop_from_normal_matrix(f, dim);
  return report.singular ? kInf : report.agdop;
}

OptimizationResult minimize_agdop(const OptimizationProblem& problem, const OptimizerOptions& opts,
                                  std::uint64_t seed) {
  const auto& topo = problem.topology;
  const int dim = problem.dim;
  require_valid(topo);
  if (dim < 1) throw InputError("dimension must be >= 1");
  if (topo.n_sensors() == 0) throw InputError("optimization needs at least one sensor");
  if (topo.n_nodes() < 2) throw InputError("optimization needs at least two nodes");
  if (topo.n_links() < static_cast<std::size_t>(dim) * topo.n_sensors())
    throw InputError("topology has fewer links than unknown coordinates; AGDOP is infinite everywhere");
  if (opts.restarts == 0) throw InputError("at least one restart is required");

  const auto n_nodes = static_cast<Eigen::Index>(topo.n_nodes());
  auto unpack = [&](const std::vector<double>& x) {
    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(dim, n_nodes);
    coords(0, 1) = 1.0;
    coords.rightCols(n_nodes - 2) = Eigen::Map<const Eigen::MatrixXd>(x.data(), dim, n_nodes - 2);
    return coords;
  };

  std::vector<double> values(opts.restarts, kInf);
  std::vector<Eigen::MatrixXd> placements(opts.restarts);
  parallel_for(opts.restarts, opts.threads, [&](std::size_t r) {
    Rng rng = Rng::stream(seed, r);
    Eigen::MatrixXd coords(dim, n_nodes);
    do {
      for (Eigen::Index i = 0; i < coords.size(); ++i) coords.data()[i] = rng.uniform();
    } while (!fix_gauge(coords));

    const Eigen::MatrixXd free_part = coords.rightCols(n_nodes - 2);
    std::vector<double> x0(free_part.data(), free_part.data() + free_part.size());
    double scale = 0.0;
    for (double xi : x0) scale = std::max(scale, std::abs(xi));

    NelderMeadOptions nm;
    nm.max_evals = opts.max_evals;
    nm.tol = opts.tol;
    nm.initial_step = 0.1 * std::max(1.0, scale);
    NodePositions scratch(dim, topo.n_nodes());
    auto objective = [&](const std::vector<double>& x) {
      scratch.matrix() = unpack(x);
      return agdop_objective(topo, scratch);
    };
    NelderMeadResult res = nelder_mead(objective, std::move(x0), nm);
    values[r] = res.value;
    placements[r] = unpack(res.x);
  });

  OptimizationResult out;
  out.restart_agdop = values;
  std::size_t best = opts.restarts;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    if (!std::isfinite(values[r])) {
      ++out.singular_restarts;
      continue;
    }
    if (best == opts.restarts || values[r] < values[best]) best = r;
  }
  if (best == opts.restarts) throw ComputationError("every restart stayed in the singular region");
  Eigen::MatrixXd coords = placements[best];
  canonicalize_reflection(coords);
  out.best_agdop = values[best];
  out.best_restart = best;
  out.best_positions = NodePositions(std::move(coords));
  return out;
}

std::vector<double> optimal_single_sensor_angles(std::size_t n_anchors) {
  if (n_anchors < 2) throw InputError("at least two anchors are required");
  std::vector<double> out(n_anchors);
  for (std::size_t i = 0; i < n_anchors; ++i)
    out[i] = 2.0 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n_anchors);
  return out;
}

NetworkTopology star_topology(std::size_t n_anchors) {
  std::vector<Link> links;
  for (std::size_t a = 0; a < n_anchors; ++a) links.emplace_back(0, 1 + a);
  return NetworkTopology(1, n_anchors, std::move(links));
}

NetworkTopology reference_case_topology(int case_id) {
  std::size_t ns = 0;
  std::size_t anchors_per_sensor = 0;
  switch (case_id) {
    case 1: ns = 2, anchors_per_sensor = 2; break;
    case 2: ns = 2, anchors_per_sensor = 3; break;
    case 3: ns = 3, anchors_per_sensor = 1; break;
    case 4: ns = 3, anchors_per_sensor = 2; break;
    default: throw InputError("reference case must be 1, 2, 3 or 4");
  }
  std::vector<Link> links;
  // Two sensors share one link; three sensors form a triangle.
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = i + 1; j < ns; ++j) links.emplace_back(i, j);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < anchors_per_sensor; ++a) links.emplace_back(s, ns + s * anchors_per_sensor + a);
  return NetworkTopology(ns, ns * anchors_per_sensor, std::move(links));
}

}  // namespace coloc
