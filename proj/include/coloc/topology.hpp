#pragma once

// Network model shared by every other module: which nodes are sensors, which
// are anchors, which pairs share a ranging link, and where the nodes sit.
//
// Nodes are indexed 0-based internally. Sensors occupy [0, n_sensors) and
// anchors occupy [n_sensors, n_nodes). The file formats use 1-based indices;
// conversion happens in instance_io.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace coloc {

// Unordered node pair stored as (min, max).
struct Link {
  std::size_t a = 0;
  std::size_t b = 0;

  Link() = default;
  Link(std::size_t i, std::size_t j) : a(i < j ? i : j), b(i < j ? j : i) {}

  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

class NetworkTopology {
 public:
  NetworkTopology() = default;
  // Links are canonicalized but not validated; see validate_topology.
  NetworkTopology(std::size_t n_sensors, std::size_t n_anchors, std::vector<Link> links);

  std::size_t n_sensors() const { return n_sensors_; }
  std::size_t n_anchors() const { return n_anchors_; }
  std::size_t n_nodes() const { return n_sensors_ + n_anchors_; }
  const std::vector<Link>& links() const { return links_; }
  std::size_t n_links() const { return links_.size(); }

  bool is_sensor(std::size_t node) const { return node < n_sensors_; }
  bool is_anchor(std::size_t node) const { return node >= n_sensors_ && node < n_nodes(); }

  // K_S: links with both endpoints sensors.
  std::size_t sensor_link_count() const;
  // K_A: links joining an anchor and a sensor.
  std::size_t anchor_link_count() const;

 private:
  std::size_t n_sensors_ = 0;
  std::size_t n_anchors_ = 0;
  std::vector<Link> links_;
};

enum class ViolationKind { SelfLoop, DuplicateLink, AnchorToAnchor, IndexOutOfRange };

struct Violation {
  ViolationKind kind;
  std::size_t link_index;
  std::string message;
};

std::string to_string(ViolationKind kind);

// Empty result means the topology is a simple graph with no anchor-to-anchor
// links and all indices in range.
std::vector<Violation> validate_topology(const NetworkTopology& topology);

// Throws InputError carrying the first violation when the topology is invalid.
void require_valid(const NetworkTopology& topology);

// Sensors with no incident link. Allowed, but their DOP is infinite.
std::vector<std::size_t> isolated_sensors(const NetworkTopology& topology);

struct NodeDegrees {
  std::size_t degree = 0;
  std::size_t sensor_degree = 0;
  std::size_t anchor_degree = 0;
};

struct DegreeSummary {
  double avg_degree = 0.0;
  double avg_sensor_degree = 0.0;
  double avg_anchor_degree = 0.0;
  std::vector<NodeDegrees> per_sensor;
};

// Averages are taken over sensor nodes only. Throws InputError if there are no sensors.
DegreeSummary degree_summary(const NetworkTopology& topology);

// Coordinates of every node, one column per node.
class NodePositions {
 public:
  NodePositions() = default;
  explicit NodePositions(Eigen::MatrixXd coords);
  NodePositions(int dim, std::size_t n_nodes);

  int dim() const { return static_cast<int>(coords_.rows()); }
  std::size_t n_nodes() const { return static_cast<std::size_t>(coords_.cols()); }

  Eigen::VectorXd at(std::size_t node) const { return coords_.col(static_cast<Eigen::Index>(node)); }
  auto col(std::size_t node) { return coords_.col(static_cast<Eigen::Index>(node)); }
  auto col(std::size_t node) const { return coords_.col(static_cast<Eigen::Index>(node)); }
  const Eigen::MatrixXd& matrix() const { return coords_; }
  Eigen::MatrixXd& matrix() { return coords_; }

  double distance(std::size_t i, std::size_t j) const;

 private:
  Eigen::MatrixXd coords_;
};

struct NetworkInstance {
  NetworkTopology topology;
  NodePositions positions;
};

}  // namespace coloc
