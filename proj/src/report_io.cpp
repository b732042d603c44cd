#include "coloc/report_io.hpp"

#include "coloc/error.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace coloc {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void append_row(std::ostringstream& os, const ConfigSummary& s) {
  os << csv_field(s.model) << ',' << csv_field(s.params) << ',' << s.n_sensors << ',' << format_number(s.delta_s)
     << ',' << format_number(s.delta_a) << ',' << format_number(s.lb) << ',' << format_number(s.agdop_mean) << ','
     << format_number(s.agdop.min) << ',' << format_number(s.agdop.q1) << ',' << format_number(s.agdop.median)
     << ',' << format_number(s.agdop.q3) << ',' << format_number(s.agdop.max) << ','
     << format_number(s.singular_fraction) << ',' << s.trials << ',' << s.n_anchors << ',' << s.dim << ','
     << format_number(s.huge_fraction) << ',' << (s.likely_infinite ? "true" : "false") << ','
     << csv_field(s.status) << '\n';
}

std::string header_line(bool with_grid_index) {
  std::string h = with_grid_index ? "grid_index" : "";
  for (const auto& c : summary_columns()) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h + '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "infinite" : "-infinite";
  return v;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "model",      "params",     "n_sensors",    "delta_s",   "delta_a",           "lb",
      "agdop_mean", "agdop_min",  "agdop_q1",     "agdop_median", "agdop_q3",       "agdop_max",
      "singular_fraction", "trials", "n_anchors", "dim",       "huge_fraction",     "likely_infinite",
      "status"};
  return cols;
}

std::string summary_csv(std::span<const ConfigSummary> rows) {
  std::ostringstream os;
  os << header_line(false);
  for (const auto& r : rows) append_row(os, r);
  return os.str();
}

std::string degree_bins_csv(std::span<const SweepPoint> points) {
  std::ostringstream os;
  os << header_line(true);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (const auto& b : points[i].degree_bins) {
      os << i << ',';
      append_row(os, b);
    }
  return os.str();
}

nlohmann::json to_json(const ConnectivityBound& bound) {
  return {{"lb_e_agdop", json_number(bound.lb_e_agdop)},
          {"eta", json_number(bound.eta)},
          {"zeta", json_number(bound.zeta)},
          {"likely_infinite", likely_infinite_eagdop(bound.lb_e_agdop, bound.dim)},
          {"inputs",
           {{"n_sensors", bound.n_sensors},
            {"sensor_degree", bound.sensor_degree},
            {"anchor_degree", bound.anchor_degree},
            {"dim", bound.dim}}}};
}

nlohmann::json to_json(const DopReport& report, bool take_sqrt) {
  nlohmann::json per = nlohmann::json::array();
  for (Eigen::Index i = 0; i < report.per_coord_dop.size(); ++i) per.push_back(json_number(report.per_coord_dop[i]));
  nlohmann::json out = {{"dim", report.dim},
                        {"n_sensors", report.n_sensors},
                        {"singular", report.singular},
                        {"per_coord_dop", per},
                        {"gdop", json_number(report.gdop)},
                        {"agdop", json_number(report.agdop)},
                        {"condition_estimate", json_number(report.condition_estimate)}};
  if (take_sqrt) {
    nlohmann::json per_sqrt = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.per_coord_dop.size(); ++i)
      per_sqrt.push_back(json_number(std::sqrt(report.per_coord_dop[i])));
    out["sqrt"] = {{"per_coord_dop", per_sqrt},
                   {"gdop", json_number(std::sqrt(report.gdop))},
                   {"agdop", json_number(std::sqrt(report.agdop))}};
  }
  return out;
}

nlohmann::json to_json(const SolverResult& result, int dim) {
  nlohmann::json sensors = nlohmann::json::array();
  const Eigen::MatrixXd m = result.sensor_matrix(dim);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    nlohmann::json p = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) p.push_back(json_number(m(r, c)));
    sensors.push_back(std::move(p));
  }
  nlohmann::json steps = nlohmann::json::array();
  for (double s : result.step_norms) steps.push_back(json_number(s));
  return {{"converged", result.converged},
          {"status", to_string(result.status)},
          {"iterations", result.iterations},
          {"residual_norm", json_number(result.residual_norm)},
          {"sensors", sensors},
          {"step_norms", steps}};
}

nlohmann::json positions_json(const NodePositions& positions) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t n = 0; n < positions.n_nodes(); ++n) {
    nlohmann::json p = nlohmann::json::array();
    const auto c = positions.col(n);
    for (Eigen::Index r = 0; r < c.size(); ++r) p.push_back(json_number(c[r] + 0.0));  // no -0
    out.push_back(std::move(p));
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ComputationError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

ManifestEntry write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw InputError("write failed for " + path.string());
  ManifestEntry e;
  e.file = name;
  e.sha256 = sha256_hex(content);
  e.bytes = content.size();
  std::size_t lines = 0;
  for (char c : content) lines += (c == '\n');
  e.rows = lines > 0 ? lines - 1 : 0;  // header excluded
  return e;
}

nlohmann::json make_manifest(const nlohmann::json& config_echo, std::uint64_t seed,
                             std::span<const ManifestEntry> outputs) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : outputs)
    files.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}, {"rows", e.rows}});
  return {{"tool", "coloc"},
          {"version", kToolVersion},
          {"seed", seed},
          {"timestamp", utc_timestamp()},
          {"config", config_echo},
          {"outputs", files}};
}

}  // namespace coloc
