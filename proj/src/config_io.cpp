#include "coloc/config_io.hpp"

#include "coloc/error.hpp"
#include "coloc/instance_io.hpp"
#include "coloc/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coloc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (in >> item) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = item.find(',', start);
      const auto piece = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

struct Entry {
  std::size_t line;
  std::size_t column;  // of the value
  std::string key;
  std::string value;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line, column, key + ": " + message); }

  double real() const {
    const auto items = split_list(value);
    if (items.size() != 1) fail("expected one number");
    return to_real(items[0]);
  }

  double to_real(const std::string& s) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) fail("'" + s + "' is not a number");
    return v;
  }

  std::uint64_t to_count(const std::string& s) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("'" + s + "' is not a non-negative integer");
    return v;
  }

  std::uint64_t count() const {
    const auto items = split_list(value);
    if (items.size() != 1) fail("expected one integer");
    return to_count(items[0]);
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& s : split_list(value)) out.push_back(to_real(s));
    return out;
  }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(value)) out.push_back(to_count(s));
    return out;
  }

  std::string word() const {
    const auto items = split_list(value);
    if (items.size() != 1) fail("expected one word");
    return items[0];
  }

  AnchorPlacement placement() const {
    const auto w = word();
    if (w == "corners") return AnchorPlacement::Corners;
    if (w == "uniform") return AnchorPlacement::UniformRandom;
    if (w == "directions") return AnchorPlacement::UniformDirections;
    fail("unknown anchor placement '" + w + "' (corners, uniform, directions)");
  }
};

struct PendingBlock {
  SweepBlock block;
  Entry opener;
  bool has_params = false, has_ds = false, has_da = false, has_ns = false, has_na = false;
};

void finish_block(PendingBlock& p, const ExperimentConfig& cfg, std::vector<SweepBlock>& out) {
  auto& b = p.block;
  if (b.model == "degree") {
    if (p.has_params) p.opener.fail("degree blocks take sweep.delta_s and sweep.delta_a, not sweep.param");
    if (!p.has_ds || !p.has_da) p.opener.fail("degree blocks need sweep.delta_s and sweep.delta_a");
  } else {
    if (p.has_ds || p.has_da) p.opener.fail("sweep.delta_s/delta_a only apply to degree blocks");
    if (!p.has_params) p.opener.fail("block needs sweep.param");
  }
  if (!p.has_ns) p.opener.fail("block needs sweep.n_sensors");
  if (!p.has_na) b.n_anchors = {cfg.default_anchors};
  out.push_back(std::move(b));
}

}  // namespace

ExperimentConfig::ExperimentConfig() : seed(kDefaultSeed) {}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::vector<PendingBlock> pending;
  std::set<std::string> seen_global;
  std::set<std::string> seen_block;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string text = raw.substr(0, raw.find('#'));
    if (trim(text).empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      const auto col = text.find_first_not_of(" \t") + 1;
      throw ParseError(number, col, "expected 'key = value'");
    }
    Entry e;
    e.line = number;
    e.key = trim(text.substr(0, eq));
    e.value = trim(text.substr(eq + 1));
    const auto vpos = text.find_first_not_of(" \t", eq + 1);
    e.column = (vpos == std::string::npos ? eq + 1 : vpos) + 1;
    if (e.key.empty()) throw ParseError(number, 1, "missing key");

    if (e.key.rfind("sweep.", 0) == 0) {
      if (e.key == "sweep.model") {
        const auto m = e.word();
        if (m != "erg" && m != "rgg" && m != "rpg" && m != "degree")
          e.fail("unknown model '" + m + "' (erg, rgg, rpg, degree)");
        PendingBlock p;
        p.block.model = m;
        p.block.anchors = cfg.default_placement;
        p.opener = e;
        pending.push_back(std::move(p));
        seen_block.clear();
        continue;
      }
      if (pending.empty()) e.fail("sweep keys must follow a sweep.model line");
      if (!seen_block.insert(e.key).second) e.fail("repeated within one block");
      auto& p = pending.back();
      if (e.key == "sweep.param") {
        p.block.params = e.reals();
        p.has_params = true;
      } else if (e.key == "sweep.delta_s") {
        p.block.delta_s = e.reals();
        p.has_ds = true;
      } else if (e.key == "sweep.delta_a") {
        p.block.delta_a = e.reals();
        p.has_da = true;
      } else if (e.key == "sweep.n_sensors") {
        p.block.n_sensors = e.counts();
        p.has_ns = true;
      } else if (e.key == "sweep.n_anchors") {
        p.block.n_anchors = e.counts();
        p.has_na = true;
      } else if (e.key == "sweep.anchors") {
        p.block.anchors = e.placement();
      } else {
        e.fail("unknown sweep key");
      }
      continue;
    }

    if (!pending.empty()) e.fail("global keys must come before the first sweep.model");
    if (!seen_global.insert(e.key).second) e.fail("repeated key");
    if (e.key == "trials") {
      cfg.run.trials = e.count();
      if (cfg.run.trials == 0) e.fail("must be at least 1");
    } else if (e.key == "seed") {
      cfg.seed = e.count();
    } else if (e.key == "dim") {
      const auto d = e.count();
      if (d < 1 || d > 16) e.fail("must be in 1..16");
      cfg.dim = static_cast<int>(d);
    } else if (e.key == "n_anchors") {
      cfg.default_anchors = e.count();
    } else if (e.key == "anchors") {
      cfg.default_placement = e.placement();
    } else if (e.key == "policy") {
      const auto w = e.word();
      if (w == "exclude")
        cfg.run.policy = SingularPolicy::ExcludeAndCount;
      else if (w == "propagate")
        cfg.run.policy = SingularPolicy::PropagateInfinite;
      else
        e.fail("unknown policy '" + w + "' (exclude, propagate)");
    } else if (e.key == "threads") {
      cfg.run.threads = static_cast<unsigned>(e.count());
    } else if (e.key == "huge_agdop") {
      cfg.run.huge_agdop = e.real();
      if (!(cfg.run.huge_agdop > 0.0)) e.fail("must be > 0");
    } else if (e.key == "sigma") {
      cfg.sigma = e.real();
      if (!(cfg.sigma > 0.0)) e.fail("must be > 0");
    } else {
      e.fail("unknown key");
    }
  }
  for (auto& p : pending) finish_block(p, cfg, cfg.blocks);
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return parse_config(in);
}

std::vector<GraphModelSpec> expand_grid(const ExperimentConfig& config) {
  std::vector<GraphModelSpec> grid;
  for (const auto& b : config.blocks) {
    std::vector<GraphModel> models;
    if (b.model == "degree") {
      for (double ds : b.delta_s)
        for (double da : b.delta_a) models.push_back(DegreeTarget{ds, da});
    } else {
      for (double v : b.params) {
        if (b.model == "erg") {
          models.push_back(ErdosRenyi{v});
        } else if (b.model == "rgg") {
          models.push_back(Geometric{v});
        } else {
          // Non-integer or negative k is caught per point by check_spec.
          const bool integral = v >= 0.0 && v == std::floor(v);
          models.push_back(Proximity{integral ? static_cast<std::size_t>(v) : 0});
        }
      }
    }
    for (std::size_t ns : b.n_sensors)
      for (std::size_t na : b.n_anchors)
        for (const auto& m : models) {
          GraphModelSpec spec;
          spec.model = m;
          spec.n_sensors = ns;
          spec.n_anchors = na;
          spec.dim = config.dim;
          spec.anchors.placement = b.anchors;
          grid.push_back(std::move(spec));
        }
  }
  return grid;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : config.blocks) {
    nlohmann::json jb = {{"model", b.model},
                         {"n_sensors", b.n_sensors},
                         {"n_anchors", b.n_anchors},
                         {"anchors", to_string(b.anchors)}};
    if (b.model == "degree") {
      jb["delta_s"] = b.delta_s;
      jb["delta_a"] = b.delta_a;
    } else {
      jb["param"] = b.params;
    }
    blocks.push_back(std::move(jb));
  }
  return {{"trials", config.run.trials},
          {"seed", config.seed},
          {"dim", config.dim},
          {"policy", to_string(config.run.policy)},
          {"huge_agdop", config.run.huge_agdop},
          {"sigma", config.sigma},
          {"n_anchors", config.default_anchors},
          {"anchors", to_string(config.default_placement)},
          {"grid_points", expand_grid(config).size()},
          {"sweep", std::move(blocks)}};
}

}  // namespace coloc
