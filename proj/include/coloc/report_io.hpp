#pragma once

// CSV, JSON and manifest emission.

#include "coloc/dop.hpp"
#include "coloc/experiment.hpp"
#include "coloc/lateration.hpp"
#include "coloc/optimizer.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coloc {

inline constexpr const char* kToolVersion = "1.0.0";

// %.9g; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

// Infinite values become the string "infinite", NaN becomes null.
nlohmann::json json_number(double v);

const std::vector<std::string>& summary_columns();
std::string summary_csv(std::span<const ConfigSummary> rows);
// Degree groups of every grid point, tagged with the grid index.
std::string degree_bins_csv(std::span<const SweepPoint> points);

nlohmann::json to_json(const ConnectivityBound& bound);
// With take_sqrt the per-coordinate, total and average values are reported as
// square roots (the conventional "root" DOP) in addition to the plain ones.
nlohmann::json to_json(const DopReport& report, bool take_sqrt = false);
nlohmann::json to_json(const SolverResult& result, int dim);
nlohmann::json positions_json(const NodePositions& positions);

std::string sha256_hex(std::string_view data);

struct ManifestEntry {
  std::string file;
  std::string sha256;
  std::size_t bytes = 0;
  std::size_t rows = 0;
};

// Writes bytes verbatim (no newline translation).
ManifestEntry write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content);

nlohmann::json make_manifest(const nlohmann::json& config_echo, std::uint64_t seed,
                             std::span<const ManifestEntry> outputs);

}  // namespace coloc
