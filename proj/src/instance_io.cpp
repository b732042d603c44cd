#include "coloc/instance_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace coloc {

namespace {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

std::vector<Token> tokenize(const std::string& raw) {
  std::vector<Token> out;
  const std::string text = raw.substr(0, raw.find('#'));
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    out.push_back({text.substr(start, i - start), start + 1});
  }
  return out;
}

double parse_real(const Line& line, const Token& tok) {
  double value = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParseError(line.number, tok.column, "expected a finite number, found '" + tok.text + "'");
  return value;
}

std::size_t parse_count(const Line& line, const Token& tok, const char* what) {
  std::size_t value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line.number, tok.column, std::string("expected ") + what + ", found '" + tok.text + "'");
  return value;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

InstanceFile parse_instance(std::istream& in, bool topology_only) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto tokens = tokenize(raw);
    if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
  }
  if (lines.empty()) throw ParseError(number + 1, 1, "missing header 'dim N_S N_A'");

  const Line& header = lines.front();
  if (header.tokens.size() != 3)
    throw ParseError(header.number, header.tokens.front().column, "header must be 'dim N_S N_A'");
  const std::size_t dim = parse_count(header, header.tokens[0], "a dimension");
  const std::size_t ns = parse_count(header, header.tokens[1], "a sensor count");
  const std::size_t na = parse_count(header, header.tokens[2], "an anchor count");
  if (dim < 1 || dim > 16) throw ParseError(header.number, header.tokens[0].column, "dimension must be in 1..16");
  if (ns < 1) throw ParseError(header.number, header.tokens[1].column, "at least one sensor is required");
  const std::size_t n_nodes = ns + na;

  InstanceFile out;
  out.dim = static_cast<int>(dim);
  std::size_t cursor = 1;
  if (!topology_only) {
    NodePositions pos(out.dim, n_nodes);
    for (std::size_t n = 0; n < n_nodes; ++n, ++cursor) {
      if (cursor >= lines.size())
        throw ParseError(number + 1, 1,
                         "expected " + std::to_string(n_nodes) + " coordinate lines, found " + std::to_string(n));
      const Line& line = lines[cursor];
      if (line.tokens.size() != dim)
        throw ParseError(line.number, line.tokens.front().column,
                         "coordinate line needs exactly " + std::to_string(dim) + " values");
      for (std::size_t m = 0; m < dim; ++m)
        pos.col(n)[static_cast<Eigen::Index>(m)] = parse_real(line, line.tokens[m]);
    }
    out.positions = std::move(pos);
  }

  std::vector<Link> links;
  std::vector<std::size_t> link_lines;
  RangeMeasurementSet meas;
  std::optional<bool> with_range;
  for (; cursor < lines.size(); ++cursor) {
    const Line& line = lines[cursor];
    if (line.tokens.size() < 2 || line.tokens.size() > 4)
      throw ParseError(line.number, line.tokens.front().column, "link line must be 'i j [rho] [sigma]'");
    std::size_t ends[2];
    for (int e = 0; e < 2; ++e) {
      ends[e] = parse_count(line, line.tokens[e], "a node index");
      if (ends[e] < 1 || ends[e] > n_nodes)
        throw ParseError(line.number, line.tokens[e].column,
                         "node index must be in 1.." + std::to_string(n_nodes));
    }
    const bool has_range = line.tokens.size() >= 3;
    if (with_range && *with_range != has_range)
      throw ParseError(line.number, line.tokens.back().column,
                       "either every link carries a measured range or none does");
    with_range = has_range;
    if (has_range) {
      meas.measured.push_back(parse_real(line, line.tokens[2]));
      double sigma = 1.0;
      if (line.tokens.size() == 4) {
        sigma = parse_real(line, line.tokens[3]);
        if (!(sigma > 0.0)) throw ParseError(line.number, line.tokens[3].column, "sigma must be > 0");
      }
      meas.sigma.push_back(sigma);
    }
    links.emplace_back(ends[0] - 1, ends[1] - 1);
    link_lines.push_back(line.number);
  }

  out.topology = NetworkTopology(ns, na, std::move(links));
  const auto violations = validate_topology(out.topology);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw ParseError(link_lines[v.link_index], 1, v.message);
  }
  if (with_range.value_or(false)) out.measurements = std::move(meas);
  return out;
}

InstanceFile parse_instance_string(const std::string& text, bool topology_only) {
  std::istringstream in(text);
  return parse_instance(in, topology_only);
}

InstanceFile read_instance_file(const std::filesystem::path& path, bool topology_only) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path.string());
  return parse_instance(in, topology_only);
}

std::string format_instance(const InstanceFile& instance) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << instance.dim << ' ' << instance.topology.n_sensors() << ' ' << instance.topology.n_anchors() << '\n';
  if (instance.positions) {
    for (std::size_t n = 0; n < instance.positions->n_nodes(); ++n) {
      const auto p = instance.positions->col(n);
      for (Eigen::Index m = 0; m < p.size(); ++m) os << (m ? " " : "") << p[m];
      os << '\n';
    }
  }
  const auto& links = instance.topology.links();
  for (std::size_t k = 0; k < links.size(); ++k) {
    os << links[k].a + 1 << ' ' << links[k].b + 1;
    if (instance.measurements) os << ' ' << instance.measurements->measured[k] << ' ' << instance.measurements->sigma[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace coloc
