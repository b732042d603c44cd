#include "coloc/experiment.hpp"

#include "coloc/dop.hpp"
#include "coloc/error.hpp"
#include "coloc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace coloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sorted input; +inf entries are allowed.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats_sorted(const std::vector<double>& sorted) {
  BoxStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  const double upper_fence = s.q3 + 1.5 * iqr;
  const double lower_fence = s.q1 - 1.5 * iqr;
  s.lower_whisker = s.max;
  s.upper_whisker = s.min;
  for (double v : sorted) {
    if (v > upper_fence) {
      ++s.outliers;
      continue;
    }
    if (v >= lower_fence) {
      s.lower_whisker = std::min(s.lower_whisker, v);
      s.upper_whisker = std::max(s.upper_whisker, v);
    }
  }
  return s;
}

struct TrialOutcome {
  double agdop = kInf;
  std::size_t sensor_links = 0;  // K_S
  std::size_t anchor_links = 0;  // K_A
};

std::vector<TrialOutcome> simulate_trials(const GraphModelSpec& spec, const RunOptions& opts, std::uint64_t seed) {
  check_spec(spec);
  if (opts.trials == 0) throw InputError("at least one trial is required");
  std::vector<TrialOutcome> outcomes(opts.trials);
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);
    const NetworkInstance inst = generate(spec, rng);
    const DopReport dop = compute_dop(inst.topology, inst.positions);
    outcomes[t] = {dop.singular ? kInf : dop.agdop, inst.topology.sensor_link_count(),
                   inst.topology.anchor_link_count()};
  });
  return outcomes;
}

ConfigSummary summarize(const GraphModelSpec& spec, const RunOptions& opts,
                        std::span<const TrialOutcome* const> trials) {
  ConfigSummary out;
  out.model = model_name(spec.model);
  out.params = model_params(spec.model);
  out.n_sensors = spec.n_sensors;
  out.n_anchors = spec.n_anchors;
  out.dim = spec.dim;
  out.trials = trials.size();

  std::vector<double> included;
  included.reserve(trials.size());
  // Link counts are integers, so these sums are exact.
  std::size_t sum_ks = 0;
  std::size_t sum_ka = 0;
  std::size_t singular = 0;
  std::size_t huge = 0;
  for (const TrialOutcome* o : trials) {
    const bool finite = std::isfinite(o->agdop);
    if (!finite) ++singular;
    if (!finite || o->agdop > opts.huge_agdop) ++huge;
    if (!finite && opts.policy == SingularPolicy::ExcludeAndCount) continue;
    included.push_back(o->agdop);
    sum_ks += o->sensor_links;
    sum_ka += o->anchor_links;
  }
  out.finite_trials = trials.size() - singular;
  out.singular_fraction = static_cast<double>(singular) / static_cast<double>(trials.size());
  out.huge_fraction = static_cast<double>(huge) / static_cast<double>(trials.size());
  if (included.empty()) throw ComputationError("every trial produced a singular geometry");

  // delta_s = 2 K_S / N_S and delta_a = K_A / N_S, averaged over included trials.
  const double denom = static_cast<double>(included.size()) * static_cast<double>(spec.n_sensors);
  out.delta_s = 2.0 * static_cast<double>(sum_ks) / denom;
  out.delta_a = static_cast<double>(sum_ka) / denom;
  out.lb = lb_e_agdop(spec.n_sensors, out.delta_s, out.delta_a, spec.dim).lb_e_agdop;
  out.likely_infinite = likely_infinite_eagdop(out.lb, spec.dim);

  double total = 0.0;
  for (double v : included) total += v;
  out.agdop_mean = total / static_cast<double>(included.size());
  if (opts.keep_samples) out.samples = included;
  std::sort(included.begin(), included.end());
  out.agdop = box_stats_sorted(included);
  return out;
}

ConfigSummary failed_summary(const GraphModelSpec& spec, const RunOptions& opts, const std::exception& e) {
  ConfigSummary failed;
  failed.model = model_name(spec.model);
  failed.params = model_params(spec.model);
  failed.n_sensors = spec.n_sensors;
  failed.n_anchors = spec.n_anchors;
  failed.dim = spec.dim;
  failed.trials = opts.trials;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  failed.delta_s = failed.delta_a = failed.lb = failed.agdop_mean = nan;
  failed.agdop = {nan, nan, nan, nan, nan, nan, nan, 0};
  failed.singular_fraction = failed.huge_fraction = nan;
  failed.status = std::string("error: ") + e.what();
  return failed;
}

}  // namespace

std::string to_string(SingularPolicy policy) {
  return policy == SingularPolicy::ExcludeAndCount ? "exclude" : "propagate";
}

std::vector<double> quantiles(std::span<const double> samples, std::span<const double> q) {
  if (samples.empty()) throw InputError("quantiles of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw InputError("quantiles need finite samples");
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(q.size());
  for (double qi : q) {
    if (!(qi >= 0.0 && qi <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
    out.push_back(quantile_sorted(sorted, qi));
  }
  return out;
}

BoxStats box_stats(std::span<const double> samples) {
  if (samples.empty()) throw InputError("box statistics of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw InputError("box statistics need finite samples");
  std::sort(sorted.begin(), sorted.end());
  return box_stats_sorted(sorted);
}

ConfigSummary run_config(const GraphModelSpec& spec, const RunOptions& opts, std::uint64_t seed) {
  const auto outcomes = simulate_trials(spec, opts, seed);
  std::vector<const TrialOutcome*> all;
  all.reserve(outcomes.size());
  for (const auto& o : outcomes) all.push_back(&o);
  return summarize(spec, opts, all);
}

SweepPoint run_config_binned(const GraphModelSpec& spec, const RunOptions& opts, std::uint64_t seed) {
  const auto outcomes = simulate_trials(spec, opts, seed);
  std::vector<const TrialOutcome*> all;
  all.reserve(outcomes.size());
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const TrialOutcome*>> groups;
  for (const auto& o : outcomes) {
    all.push_back(&o);
    groups[{o.sensor_links, o.anchor_links}].push_back(&o);
  }
  SweepPoint out;
  out.pooled = summarize(spec, opts, all);
  for (const auto& [key, members] : groups) {
    try {
      out.degree_bins.push_back(summarize(spec, opts, members));
    } catch (const ComputationError&) {
      ++out.dropped_bins;
    }
  }
  return out;
}

std::vector<ConfigSummary> run_sweep(std::span<const GraphModelSpec> grid, const RunOptions& opts,
                                     std::uint64_t master_seed) {
  std::vector<ConfigSummary> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.push_back(run_config(grid[i], opts, derive_seed(master_seed, i)));
    } catch (const std::exception& e) {
      out.push_back(failed_summary(grid[i], opts, e));
    }
  }
  return out;
}

std::vector<SweepPoint> run_sweep_binned(std::span<const GraphModelSpec> grid, const RunOptions& opts,
                                         std::uint64_t master_seed) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.push_back(run_config_binned(grid[i], opts, derive_seed(master_seed, i)));
    } catch (const std::exception& e) {
      SweepPoint failed;
      failed.pooled = failed_summary(grid[i], opts, e);
      out.push_back(std::move(failed));
    }
  }
  return out;
}

}  // namespace coloc
