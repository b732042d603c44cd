#pragma once

// Line-oriented instance files.
//
//   # comment
//   dim N_S N_A                 header
//   x y [z ...]                 N_S + N_A coordinate lines, sensors first
//   i j [rho] [sigma]           one line per link, 1-based node indices
//
// Either every link carries a measured range rho or none does. sigma defaults
// to 1 and is only meaningful alongside rho. In topology-only mode the
// coordinate lines are absent.

#include "coloc/error.hpp"
#include "coloc/lateration.hpp"
#include "coloc/topology.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace coloc {

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct InstanceFile {
  int dim = 2;
  NetworkTopology topology;
  std::optional<NodePositions> positions;          // absent in topology-only mode
  std::optional<RangeMeasurementSet> measurements;  // present when links carry rho
};

InstanceFile parse_instance(std::istream& in, bool topology_only = false);
InstanceFile parse_instance_string(const std::string& text, bool topology_only = false);
InstanceFile read_instance_file(const std::filesystem::path& path, bool topology_only = false);

std::string format_instance(const InstanceFile& instance);

}  // namespace coloc
