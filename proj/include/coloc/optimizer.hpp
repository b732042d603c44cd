#pragma once

// Minimum-AGDOP geometry search for a fixed topology. Every node, anchors
// included, is a free variable; the objective only depends on link directions,
// so it is invariant under translation, rotation, reflection and scaling.

#include "coloc/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace coloc {

struct NelderMeadOptions {
  std::size_t max_evals = 20000;
  double tol = 1e-9;           // simplex diameter
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};

// Downhill simplex with dimension-adaptive coefficients. The simplex is rebuilt
// around the incumbent after each collapse until a rebuild stops improving or
// the evaluation budget is spent. f may return +inf for infeasible points.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts);

struct OptimizationProblem {
  NetworkTopology topology;
  int dim = 2;
};

struct OptimizerOptions {
  std::size_t restarts = 64;
  std::size_t max_evals = 20000;  // per restart
  double tol = 1e-9;
  unsigned threads = 0;
};

struct OptimizationResult {
  double best_agdop = 0.0;
  NodePositions best_positions;
  std::size_t best_restart = 0;
  std::size_t singular_restarts = 0;
  std::vector<double> restart_agdop;  // +inf for restarts that never left the singular region
};

// AGDOP of a placement; +inf for singular geometry or a zero-length link.
double agdop_objective(const NetworkTopology& topology, const NodePositions& positions);

// Multi-start search. Restart r starts from nodes drawn uniformly in the unit
// square on stream (seed, r). The gauge pins node 1 at the origin and node 2 at
// the first unit vector; in the plane the result is reflected so the first
// off-axis node has positive y. Ties keep the lowest restart index. Throws
// ComputationError when every restart is singular.
OptimizationResult minimize_agdop(const OptimizationProblem& problem, const OptimizerOptions& opts,
                                  std::uint64_t seed);

// 2*pi*i/N_A for i = 1..N_A.
std::vector<double> optimal_single_sensor_angles(std::size_t n_anchors);

// One sensor linked to each of n_anchors anchors.
NetworkTopology star_topology(std::size_t n_anchors);

// Small reference networks (two or three sensors, every anchor linked to
// exactly one sensor):
//   1: N_S=2, N_A=4, delta_s=1, delta_a=2   2: N_S=2, N_A=6, delta_s=1, delta_a=3
//   3: N_S=3, N_A=3, delta_s=2, delta_a=1   4: N_S=3, N_A=6, delta_s=2, delta_a=2
NetworkTopology reference_case_topology(int case_id);

}  // namespace coloc
