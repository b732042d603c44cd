#pragma once

// Random network generators: Erdos-Renyi, random geometric, k-nearest-neighbour
// proximity graphs, and an exact degree-targeted sampler. Sensors are drawn
// i.i.d. uniform over the unit hypercube.

#include "coloc/rng.hpp"
#include "coloc/topology.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace coloc {

struct ErdosRenyi {
  double p = 0.5;
};
struct Geometric {
  double radius = 0.5;
};
struct Proximity {
  std::size_t k = 4;
};
// Exactly N_S*delta_s/2 sensor-sensor links and N_S*delta_a anchor-sensor
// links, each set sampled uniformly without replacement.
struct DegreeTarget {
  double sensor_degree = 0.0;
  double anchor_degree = 0.0;
};

using GraphModel = std::variant<ErdosRenyi, Geometric, Proximity, DegreeTarget>;

enum class AnchorPlacement {
  Corners,            // all 2^d corners of the unit hypercube
  UniformRandom,      // i.i.d. uniform over the unit hypercube
  UniformDirections,  // single sensor only: unit distance, direction uniform on the sphere
  Explicit,           // caller-supplied coordinates
};

struct AnchorLayout {
  AnchorPlacement placement = AnchorPlacement::Corners;
  std::vector<Eigen::VectorXd> positions;  // Explicit only
};

struct GraphModelSpec {
  GraphModel model = ErdosRenyi{};
  std::size_t n_sensors = 0;
  std::size_t n_anchors = 4;
  int dim = 2;
  AnchorLayout anchors;
};

std::string model_name(const GraphModel& model);
// Model parameters rendered as "p=0.5", "r=0.3", "k=4" or "ds=2;da=1".
std::string model_params(const GraphModel& model);
std::string to_string(AnchorPlacement placement);

// Throws InputError describing the first infeasible item.
void check_spec(const GraphModelSpec& spec);

NetworkInstance generate(const GraphModelSpec& spec, Rng& rng);

NetworkInstance generate_degree_target(std::size_t n_sensors, std::size_t n_anchors, double sensor_degree,
                                       double anchor_degree, int dim, const AnchorLayout& anchors, Rng& rng);

// Uniform k-subset of [0, n) in sampling order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace coloc
