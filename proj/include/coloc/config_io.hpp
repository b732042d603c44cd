#pragma once

// Flat key = value experiment configs. Global keys come first; each
// `sweep.model = ...` line opens a new block whose `sweep.*` keys follow.
//
//   trials = 2000
//   seed = 42
//   dim = 2
//   policy = exclude            # or propagate
//   sweep.model = erg           # erg | rgg | rpg | degree
//   sweep.param = 0.3 0.5 0.7   # p, r or k (not for degree)
//   sweep.n_sensors = 8 16 24 32
//   sweep.n_anchors = 4
//   sweep.anchors = corners     # corners | uniform | directions
//
// Degree blocks take `sweep.delta_s` and `sweep.delta_a` lists instead of
// `sweep.param`. A block expands to the product of its lists.

#include "coloc/experiment.hpp"
#include "coloc/randgraph.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace coloc {

struct SweepBlock {
  std::string model;  // erg, rgg, rpg, degree
  std::vector<double> params;
  std::vector<double> delta_s;
  std::vector<double> delta_a;
  std::vector<std::size_t> n_sensors;
  std::vector<std::size_t> n_anchors;
  AnchorPlacement anchors = AnchorPlacement::Corners;
};

struct ExperimentConfig {
  RunOptions run;
  std::uint64_t seed;
  int dim = 2;
  double sigma = 0.01;  // recorded for lateration follow-ups; DOP does not depend on it
  std::size_t default_anchors = 4;
  AnchorPlacement default_placement = AnchorPlacement::Corners;
  std::vector<SweepBlock> blocks;

  ExperimentConfig();
};

// Throws ParseError (an InputError) with the offending line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig read_config_file(const std::filesystem::path& path);

// Grid points in block order, then n_sensors, n_anchors, parameters.
std::vector<GraphModelSpec> expand_grid(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace coloc
