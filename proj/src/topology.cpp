#include "coloc/topology.hpp"

#include "coloc/error.hpp"

#include <set>
#include <utility>

namespace coloc {

NetworkTopology::NetworkTopology(std::size_t n_sensors, std::size_t n_anchors, std::vector<Link> links)
    : n_sensors_(n_sensors), n_anchors_(n_anchors), links_(std::move(links)) {
  for (auto& link : links_) link = Link(link.a, link.b);
}

std::size_t NetworkTopology::sensor_link_count() const {
  std::size_t count = 0;
  for (const auto& link : links_)
    if (is_sensor(link.a) && is_sensor(link.b)) ++count;
  return count;
}

std::size_t NetworkTopology::anchor_link_count() const {
  std::size_t count = 0;
  for (const auto& link : links_)
    if (is_sensor(link.a) != is_sensor(link.b)) ++count;
  return count;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::SelfLoop: return "self-loop";
    case ViolationKind::DuplicateLink: return "duplicate link";
    case ViolationKind::AnchorToAnchor: return "anchor-to-anchor link";
    case ViolationKind::IndexOutOfRange: return "node index out of range";
  }
  return "unknown";
}

namespace {

std::string describe(const Link& link) {
  // 1-based, matching the file formats.
  return "(" + std::to_string(link.a + 1) + "," + std::to_string(link.b + 1) + ")";
}

}  // namespace

std::vector<Violation> validate_topology(const NetworkTopology& topology) {
  std::vector<Violation> out;
  std::set<Link> seen;
  const auto& links = topology.links();
  for (std::size_t k = 0; k < links.size(); ++k) {
    const Link& link = links[k];
    auto report = [&](ViolationKind kind) {
      out.push_back({kind, k, to_string(kind) + " " + describe(link) + " at link " + std::to_string(k + 1)});
    };
    if (link.b >= topology.n_nodes()) {
      report(ViolationKind::IndexOutOfRange);
      continue;
    }
    if (link.a == link.b) {
      report(ViolationKind::SelfLoop);
      continue;
    }
    if (topology.is_anchor(link.a) && topology.is_anchor(link.b)) report(ViolationKind::AnchorToAnchor);
    if (!seen.insert(link).second) report(ViolationKind::DuplicateLink);
  }
  return out;
}

void require_valid(const NetworkTopology& topology) {
  auto violations = validate_topology(topology);
  if (!violations.empty()) throw InputError("invalid topology: " + violations.front().message);
}

std::vector<std::size_t> isolated_sensors(const NetworkTopology& topology) {
  std::vector<bool> touched(topology.n_sensors(), false);
  for (const auto& link : topology.links()) {
    if (topology.is_sensor(link.a)) touched[link.a] = true;
    if (topology.is_sensor(link.b)) touched[link.b] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < touched.size(); ++n)
    if (!touched[n]) out.push_back(n);
  return out;
}

DegreeSummary degree_summary(const NetworkTopology& topology) {
  const std::size_t ns = topology.n_sensors();
  if (ns == 0) throw InputError("degree summary requires at least one sensor node");

  DegreeSummary summary;
  summary.per_sensor.assign(ns, {});
  auto bump = [&](std::size_t node, std::size_t other) {
    if (!topology.is_sensor(node)) return;
    auto& deg = summary.per_sensor[node];
    ++deg.degree;
    if (topology.is_sensor(other))
      ++deg.sensor_degree;
    else
      ++deg.anchor_degree;
  };
  for (const auto& link : topology.links()) {
    bump(link.a, link.b);
    bump(link.b, link.a);
  }

  std::size_t total_s = 0;
  std::size_t total_a = 0;
  for (const auto& deg : summary.per_sensor) {
    total_s += deg.sensor_degree;
    total_a += deg.anchor_degree;
  }
  const double n = static_cast<double>(ns);
  summary.avg_sensor_degree = static_cast<double>(total_s) / n;
  summary.avg_anchor_degree = static_cast<double>(total_a) / n;
  summary.avg_degree = static_cast<double>(total_s + total_a) / n;
  return summary;
}

NodePositions::NodePositions(Eigen::MatrixXd coords) : coords_(std::move(coords)) {
  if (coords_.rows() < 1) throw InputError("node positions need dimension >= 1");
}

NodePositions::NodePositions(int dim, std::size_t n_nodes)
    : NodePositions(Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(n_nodes))) {}

double NodePositions::distance(std::size_t i, std::size_t j) const {
  return (col(i) - col(j)).norm();
}

}  // namespace coloc
