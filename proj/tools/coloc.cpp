// coloc: command-line front end.
//
// Exit codes: 0 success (singular results included), 2 input error,
// 3 computational failure.

#include "coloc/config_io.hpp"
#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/experiment.hpp"
#include "coloc/instance_io.hpp"
#include "coloc/lateration.hpp"
#include "coloc/optimizer.hpp"
#include "coloc/report_io.hpp"
#include "coloc/rng.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

struct LbArgs {
  std::size_t ns = 0;
  double ds = 0.0;
  double da = 0.0;
  int dim = 2;
};

struct DopArgs {
  std::string file;
  bool sqrt = false;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> trials;
};

struct OptimizeArgs {
  int case_id = 0;
  std::size_t star = 0;
  std::string topology;
  int dim = 2;
  std::size_t restarts = coloc::OptimizerOptions{}.restarts;
  std::size_t max_evals = coloc::OptimizerOptions{}.max_evals;
  double tol = coloc::OptimizerOptions{}.tol;
};

struct LocateArgs {
  std::string file;
  double sigma = 0.01;
  double perturb = 0.05;
  std::size_t max_iter = coloc::SolverOptions{}.max_iter;
  double step_tol = coloc::SolverOptions{}.step_tol;
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_lb(const LbArgs& a) {
  print(coloc::to_json(coloc::lb_e_agdop(a.ns, a.ds, a.da, a.dim)));
  return 0;
}

int cmd_dop(const DopArgs& a) {
  const auto inst = coloc::read_instance_file(a.file);
  print(coloc::to_json(coloc::compute_dop(inst.topology, *inst.positions), a.sqrt));
  return 0;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("COLOC_OUT_DIR"); env && *env) return env;
  return "coloc_out";
}

int cmd_simulate(const SimulateArgs& a, std::optional<std::uint64_t> seed, std::optional<unsigned> threads) {
  auto cfg = coloc::read_config_file(a.config);
  if (seed) cfg.seed = *seed;
  if (threads) cfg.run.threads = *threads;
  if (a.trials) {
    if (*a.trials == 0) throw coloc::InputError("--trials must be at least 1");
    cfg.run.trials = *a.trials;
  }
  const auto grid = coloc::expand_grid(cfg);
  const auto points = coloc::run_sweep_binned(grid, cfg.run, cfg.seed);

  std::vector<coloc::ConfigSummary> pooled;
  pooled.reserve(points.size());
  for (const auto& p : points) pooled.push_back(p.pooled);

  const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw coloc::InputError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<coloc::ManifestEntry> entries;
  entries.push_back(coloc::write_output(dir, "summary.csv", coloc::summary_csv(pooled)));
  entries.push_back(coloc::write_output(dir, "degree_bins.csv", coloc::degree_bins_csv(points)));
  const auto manifest = coloc::make_manifest(coloc::to_json(cfg), cfg.seed, entries);
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';

  std::size_t failed = 0;
  for (const auto& s : pooled) failed += (s.status != "ok");
  std::cerr << "wrote " << pooled.size() << " grid points (" << failed << " failed) to " << dir.string() << '\n';
  return 0;
}

int cmd_optimize(const OptimizeArgs& a, std::uint64_t seed, unsigned threads) {
  coloc::OptimizationProblem problem;
  problem.dim = a.dim;
  if (a.case_id != 0) {
    problem.topology = coloc::reference_case_topology(a.case_id);
  } else if (a.star != 0) {
    problem.topology = coloc::star_topology(a.star);
  } else {
    const auto inst = coloc::read_instance_file(a.topology, /*topology_only=*/true);
    problem.topology = inst.topology;
    problem.dim = inst.dim;
  }
  coloc::OptimizerOptions opts;
  opts.restarts = a.restarts;
  opts.max_evals = a.max_evals;
  opts.tol = a.tol;
  opts.threads = threads;
  const auto result = coloc::minimize_agdop(problem, opts, seed);

  const auto deg = coloc::degree_summary(problem.topology);
  const auto bound = coloc::lb_e_agdop(problem.topology.n_sensors(), deg.avg_sensor_degree, deg.avg_anchor_degree,
                                       problem.dim);
  json restarts = json::array();
  for (double v : result.restart_agdop) restarts.push_back(coloc::json_number(v));
  print({{"best_agdop", coloc::json_number(result.best_agdop)},
         {"lb_e_agdop", coloc::json_number(bound.lb_e_agdop)},
         {"bound", coloc::to_json(bound)},
         {"n_sensors", problem.topology.n_sensors()},
         {"n_anchors", problem.topology.n_anchors()},
         {"dim", problem.dim},
         {"positions", coloc::positions_json(result.best_positions)},
         {"best_restart", result.best_restart},
         {"singular_restarts", result.singular_restarts},
         {"restart_agdop", restarts},
         {"seed", seed}});
  return 0;
}

int cmd_locate(const LocateArgs& a, std::uint64_t seed) {
  const auto inst = coloc::read_instance_file(a.file);
  const auto& topo = inst.topology;
  const auto& pos = *inst.positions;
  const auto ns = static_cast<Eigen::Index>(topo.n_sensors());
  const auto na = static_cast<Eigen::Index>(topo.n_anchors());
  if (!(a.perturb >= 0.0)) throw coloc::InputError("--perturb must be >= 0");

  // Stream 0 draws range noise, stream 1 the starting-point perturbation.
  coloc::RangeMeasurementSet meas;
  const bool synthetic = !inst.measurements.has_value();
  if (!synthetic) {
    meas = *inst.measurements;
  } else if (a.sigma > 0.0) {
    coloc::Rng noise = coloc::Rng::stream(seed, 0);
    meas = coloc::synthesize_measurements(topo, pos, a.sigma, noise);
  } else if (a.sigma == 0.0) {
    for (const auto& l : topo.links()) {
      meas.true_distance.push_back(pos.distance(l.a, l.b));
      meas.measured.push_back(meas.true_distance.back());
      meas.sigma.push_back(1.0);
    }
  } else {
    throw coloc::InputError("--sigma must be >= 0");
  }

  const Eigen::MatrixXd sensors = pos.matrix().leftCols(ns);
  Eigen::MatrixXd guess = sensors;
  coloc::Rng jitter = coloc::Rng::stream(seed, 1);
  for (Eigen::Index c = 0; c < guess.cols(); ++c)
    for (Eigen::Index r = 0; r < guess.rows(); ++r) guess(r, c) += a.perturb * jitter.normal();

  coloc::SolverOptions opts;
  opts.max_iter = a.max_iter;
  opts.step_tol = a.step_tol;
  const auto result = coloc::solve_wls(topo, pos.matrix().rightCols(na), meas, guess, opts);

  json out = coloc::to_json(result, inst.dim);
  out["ranges"] = synthetic ? "synthetic" : "file";
  out["seed"] = seed;
  if (synthetic) {
    out["sigma"] = a.sigma;
    out["error_norm"] = coloc::json_number((result.sensor_matrix(inst.dim) - sensors).norm());
  }
  print(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative localization: DOP, connectivity bounds, Monte-Carlo sweeps"};
  app.require_subcommand(1);

  std::uint64_t seed = coloc::kDefaultSeed;
  bool seed_given = false;
  unsigned threads = 0;
  bool threads_given = false;
  auto add_common = [&](CLI::App* sub, bool with_threads) {
    sub->add_option_function<std::uint64_t>(
           "--seed",
           [&](const std::uint64_t& v) {
             seed = v;
             seed_given = true;
           },
           "Master seed (default " + std::to_string(coloc::kDefaultSeed) + ")");
    if (with_threads)
      sub->add_option_function<unsigned>(
          "--threads",
          [&](const unsigned& v) {
            threads = v;
            threads_given = true;
          },
          "Worker cap, 0 = hardware concurrency");
  };

  LbArgs lb;
  auto* lb_cmd = app.add_subcommand("lb", "Connectivity lower bound on expected AGDOP");
  lb_cmd->add_option("--ns", lb.ns, "Number of sensors")->required()->check(CLI::PositiveNumber);
  lb_cmd->add_option("--ds", lb.ds, "Average sensor-sensor degree")->check(CLI::NonNegativeNumber);
  lb_cmd->add_option("--da", lb.da, "Average anchor degree")->required()->check(CLI::NonNegativeNumber);
  lb_cmd->add_option("--dim", lb.dim, "Dimension")->check(CLI::Range(1, 16));
  add_common(lb_cmd, false);

  DopArgs dop;
  auto* dop_cmd = app.add_subcommand("dop", "DOP report for an instance file");
  dop_cmd->add_option("file", dop.file, "Instance file")->required();
  dop_cmd->add_flag("--sqrt", dop.sqrt, "Also report square-root DOP values");
  add_common(dop_cmd, false);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte-Carlo sweep from a config file");
  sim_cmd->add_option("config", sim.config, "Config file")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory (default $COLOC_OUT_DIR or ./coloc_out)");
  sim_cmd->add_option("--trials", sim.trials, "Override trials per grid point");
  add_common(sim_cmd, true);

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Search for the minimum-AGDOP geometry of a topology");
  auto* case_opt = opt_cmd->add_option("--case", opt.case_id, "Reference network 1-4")->check(CLI::Range(1, 4));
  auto* star_opt = opt_cmd->add_option("--star", opt.star, "Single sensor linked to N anchors")
                       ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  auto* topo_opt = opt_cmd->add_option("--topology", opt.topology, "Topology-only instance file");
  case_opt->excludes(star_opt)->excludes(topo_opt);
  star_opt->excludes(topo_opt);
  opt_cmd->add_option("--dim", opt.dim, "Dimension for --case/--star")->check(CLI::Range(1, 16));
  opt_cmd->add_option("--restarts", opt.restarts, "Random restarts")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--max-evals", opt.max_evals, "Objective evaluations per restart")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--tol", opt.tol, "Simplex diameter tolerance")->check(CLI::PositiveNumber);
  add_common(opt_cmd, true);

  LocateArgs loc;
  auto* loc_cmd = app.add_subcommand("locate", "Least-squares lateration on an instance file");
  loc_cmd->add_option("file", loc.file, "Instance file; sensor coordinates are the truth or reference")->required();
  loc_cmd->add_option("--sigma", loc.sigma, "Range noise for synthetic measurements (0 = noiseless)");
  loc_cmd->add_option("--perturb", loc.perturb, "Std. dev. of the starting-point perturbation");
  loc_cmd->add_option("--max-iter", loc.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  loc_cmd->add_option("--step-tol", loc.step_tol, "Step-norm tolerance")->check(CLI::PositiveNumber);
  add_common(loc_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*lb_cmd) return cmd_lb(lb);
    if (*dop_cmd) return cmd_dop(dop);
    if (*sim_cmd)
      return cmd_simulate(sim, seed_given ? std::optional(seed) : std::nullopt,
                          threads_given ? std::optional(threads) : std::nullopt);
    if (*opt_cmd) {
      if (opt.case_id == 0 && opt.star == 0 && opt.topology.empty())
        throw coloc::InputError("optimize needs --case, --star or --topology");
      return cmd_optimize(opt, seed, threads);
    }
    if (*loc_cmd) return cmd_locate(loc, seed);
  } catch (const coloc::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const coloc::ComputationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitInput;
}
