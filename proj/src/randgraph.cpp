#include "coloc/randgraph.hpp"

#include "coloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace coloc {

namespace {

constexpr double kCoincidentDistance = 1e-12;
constexpr double kIntegerSlack = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(9);
  os << x;
  return os.str();
}

// Returns the integer nearest to x, or throws if x is not an integer.
std::size_t exact_count(double x, const char* what) {
  const double rounded = std::round(x);
  if (!std::isfinite(x) || x < -kIntegerSlack || std::abs(x - rounded) > kIntegerSlack)
    throw InputError(std::string("infeasible degree target: ") + what + " = " + format_number(x) +
                     " is not a non-negative integer");
  return static_cast<std::size_t>(rounded);
}

void draw_uniform(Eigen::Ref<Eigen::VectorXd> p, Rng& rng) {
  for (Eigen::Index m = 0; m < p.size(); ++m) p[m] = rng.uniform();
}

void draw_unit_direction(Eigen::Ref<Eigen::VectorXd> p, Rng& rng) {
  double norm = 0.0;
  do {
    for (Eigen::Index m = 0; m < p.size(); ++m) p[m] = rng.normal();
    norm = p.norm();
  } while (norm < 1e-12);
  p /= norm;
}

void check_anchor_layout(std::size_t n_sensors, std::size_t n_anchors, int dim, const AnchorLayout& layout) {
  switch (layout.placement) {
    case AnchorPlacement::Corners: {
      const std::size_t corners = std::size_t{1} << dim;
      if (n_anchors != corners)
        throw InputError("corner anchor placement in " + std::to_string(dim) + " dimensions needs exactly " +
                         std::to_string(corners) + " anchors, got " + std::to_string(n_anchors));
      break;
    }
    case AnchorPlacement::UniformRandom: break;
    case AnchorPlacement::UniformDirections:
      if (n_sensors != 1) throw InputError("direction anchor placement requires exactly one sensor");
      break;
    case AnchorPlacement::Explicit:
      if (layout.positions.size() != n_anchors)
        throw InputError("explicit anchor placement lists " + std::to_string(layout.positions.size()) +
                         " positions for " + std::to_string(n_anchors) + " anchors");
      for (const auto& p : layout.positions)
        if (p.size() != dim) throw InputError("explicit anchor position has wrong dimension");
      break;
  }
}

NodePositions place_nodes(std::size_t n_sensors, std::size_t n_anchors, int dim, const AnchorLayout& layout,
                          Rng& rng) {
  NodePositions pos(dim, n_sensors + n_anchors);
  for (std::size_t n = 0; n < n_sensors; ++n) draw_uniform(pos.col(n), rng);

  for (std::size_t a = 0; a < n_anchors; ++a) {
    auto p = pos.col(n_sensors + a);
    switch (layout.placement) {
      case AnchorPlacement::Corners:
        for (int m = 0; m < dim; ++m) p[m] = static_cast<double>((a >> m) & 1U);
        break;
      case AnchorPlacement::UniformRandom: draw_uniform(p, rng); break;
      case AnchorPlacement::UniformDirections: {
        Eigen::VectorXd dir(dim);
        draw_unit_direction(dir, rng);
        p = pos.col(0) + dir;
        break;
      }
      case AnchorPlacement::Explicit: p = layout.positions[a]; break;
    }
  }

  // Coincident nodes make a link length zero. Redraw the randomly placed node.
  const std::size_t n_nodes = n_sensors + n_anchors;
  auto collides = [&](std::size_t n) {
    for (std::size_t m = 0; m < n_nodes; ++m)
      if (m != n && pos.distance(n, m) < kCoincidentDistance) return true;
    return false;
  };
  for (std::size_t n = 0; n < n_sensors; ++n)
    while (collides(n)) draw_uniform(pos.col(n), rng);
  if (layout.placement == AnchorPlacement::UniformRandom) {
    for (std::size_t a = n_sensors; a < n_nodes; ++a)
      while (collides(a)) draw_uniform(pos.col(a), rng);
  }
  return pos;
}

std::vector<Link> erdos_renyi_links(std::size_t ns, std::size_t n, double p, Rng& rng) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) links.emplace_back(i, j);
  return links;
}

std::vector<Link> geometric_links(std::size_t ns, const NodePositions& pos, double radius) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = i + 1; j < pos.n_nodes(); ++j)
      if (pos.distance(i, j) <= radius) links.emplace_back(i, j);
  return links;
}

std::vector<Link> proximity_links(std::size_t ns, const NodePositions& pos, std::size_t k) {
  const std::size_t n = pos.n_nodes();
  std::set<Link> edges;
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < n; ++i) {
    ranked.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) ranked.emplace_back(pos.distance(i, j), j);
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = ranked[r].second;
      if (i >= ns && j >= ns) continue;
      edges.emplace(i, j);
    }
  }
  return {edges.begin(), edges.end()};
}

std::vector<Link> degree_target_links(std::size_t ns, std::size_t na, std::size_t ks, std::size_t ka, Rng& rng) {
  std::vector<Link> links;
  links.reserve(ks + ka);
  // Sensor pairs (i, j), i < j, enumerated row by row.
  std::vector<Link> sensor_pairs;
  sensor_pairs.reserve(ns * (ns - 1) / 2);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = i + 1; j < ns; ++j) sensor_pairs.emplace_back(i, j);
  for (std::size_t idx : sample_without_replacement(sensor_pairs.size(), ks, rng))
    links.push_back(sensor_pairs[idx]);
  for (std::size_t idx : sample_without_replacement(ns * na, ka, rng))
    links.emplace_back(idx % ns, ns + idx / ns);
  std::sort(links.begin(), links.end());
  return links;
}

}  // namespace

std::string model_name(const GraphModel& model) {
  return std::visit(overloaded{[](const ErdosRenyi&) { return std::string("erg"); },
                               [](const Geometric&) { return std::string("rgg"); },
                               [](const Proximity&) { return std::string("rpg"); },
                               [](const DegreeTarget&) { return std::string("degree"); }},
                    model);
}

std::string model_params(const GraphModel& model) {
  return std::visit(
      overloaded{[](const ErdosRenyi& m) { return "p=" + format_number(m.p); },
                 [](const Geometric& m) { return "r=" + format_number(m.radius); },
                 [](const Proximity& m) { return "k=" + std::to_string(m.k); },
                 [](const DegreeTarget& m) {
                   return "ds=" + format_number(m.sensor_degree) + ";da=" + format_number(m.anchor_degree);
                 }},
      model);
}

std::string to_string(AnchorPlacement placement) {
  switch (placement) {
    case AnchorPlacement::Corners: return "corners";
    case AnchorPlacement::UniformRandom: return "uniform";
    case AnchorPlacement::UniformDirections: return "directions";
    case AnchorPlacement::Explicit: return "explicit";
  }
  return "unknown";
}

void check_spec(const GraphModelSpec& spec) {
  if (spec.dim < 1) throw InputError("dimension must be >= 1");
  if (spec.dim > 16) throw InputError("dimension must be <= 16");
  if (spec.n_sensors == 0) throw InputError("at least one sensor is required");
  check_anchor_layout(spec.n_sensors, spec.n_anchors, spec.dim, spec.anchors);
  const std::size_t n = spec.n_sensors + spec.n_anchors;
  std::visit(overloaded{
                 [](const ErdosRenyi& m) {
                   if (!(m.p >= 0.0 && m.p <= 1.0)) throw InputError("ERG link probability must lie in [0, 1]");
                 },
                 [](const Geometric& m) {
                   if (!(m.radius > 0.0)) throw InputError("RGG radius must be > 0");
                 },
                 [n](const Proximity& m) {
                   if (m.k < 1) throw InputError("RPG k must be >= 1");
                   if (m.k >= n)
                     throw InputError("RPG k = " + std::to_string(m.k) + " must be smaller than the node count " +
                                      std::to_string(n));
                 },
                 [&spec](const DegreeTarget& m) {
                   const double ns = static_cast<double>(spec.n_sensors);
                   const std::size_t ks = exact_count(ns * m.sensor_degree / 2.0, "K_S = N_S*delta_s/2");
                   const std::size_t ka = exact_count(ns * m.anchor_degree, "K_A = N_S*delta_a");
                   if (ks > spec.n_sensors * (spec.n_sensors - 1) / 2)
                     throw InputError("infeasible degree target: K_S exceeds the number of sensor pairs");
                   if (ka > spec.n_sensors * spec.n_anchors)
                     throw InputError("infeasible degree target: K_A exceeds the number of anchor-sensor pairs");
                 }},
             spec.model);
}

NetworkInstance generate(const GraphModelSpec& spec, Rng& rng) {
  check_spec(spec);
  const std::size_t ns = spec.n_sensors;
  NodePositions pos = place_nodes(ns, spec.n_anchors, spec.dim, spec.anchors, rng);
  std::vector<Link> links = std::visit(
      overloaded{[&](const ErdosRenyi& m) { return erdos_renyi_links(ns, pos.n_nodes(), m.p, rng); },
                 [&](const Geometric& m) { return geometric_links(ns, pos, m.radius); },
                 [&](const Proximity& m) { return proximity_links(ns, pos, m.k); },
                 [&](const DegreeTarget& m) {
                   const double n = static_cast<double>(ns);
                   return degree_target_links(ns, spec.n_anchors, exact_count(n * m.sensor_degree / 2.0, "K_S"),
                                              exact_count(n * m.anchor_degree, "K_A"), rng);
                 }},
      spec.model);
  return {NetworkTopology(ns, spec.n_anchors, std::move(links)), std::move(pos)};
}

NetworkInstance generate_degree_target(std::size_t n_sensors, std::size_t n_anchors, double sensor_degree,
                                       double anchor_degree, int dim, const AnchorLayout& anchors, Rng& rng) {
  GraphModelSpec spec;
  spec.model = DegreeTarget{sensor_degree, anchor_degree};
  spec.n_sensors = n_sensors;
  spec.n_anchors = n_anchors;
  spec.dim = dim;
  spec.anchors = anchors;
  return generate(spec, rng);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw InputError("cannot sample more items than the population holds");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace coloc
