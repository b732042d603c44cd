#pragma once

#include "coloc/topology.hpp"

#include <Eigen/Dense>

namespace fixtures {

// Three sensors in a path ending at one anchor:
// p1=(1,0), p2=(0,0), p3=(0,1), anchor p4=(1,1); links (1,2),(2,3),(3,4).
inline coloc::NetworkTopology path_topology() { return coloc::NetworkTopology(3, 1, {{0, 1}, {1, 2}, {2, 3}}); }

inline coloc::NodePositions path_positions() {
  Eigen::MatrixXd m(2, 4);
  m << 1, 0, 0, 1,
       0, 0, 1, 1;
  return coloc::NodePositions(m);
}

// One sensor at the center of the unit square, anchors on its corners.
inline coloc::NetworkTopology corner_star() { return coloc::NetworkTopology(1, 4, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}); }

inline coloc::NodePositions corner_star_positions(double x = 0.5, double y = 0.5) {
  Eigen::MatrixXd m(2, 5);
  m << x, 0, 1, 0, 1,
       y, 0, 0, 1, 1;
  return coloc::NodePositions(m);
}

}  // namespace fixtures
