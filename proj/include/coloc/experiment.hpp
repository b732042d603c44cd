#pragma once

// Monte-Carlo harness: AGDOP sample statistics for random networks compared
// with the connectivity lower bound.

#include "coloc/randgraph.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coloc {

enum class SingularPolicy {
  ExcludeAndCount,    // singular trials are counted, statistics use finite samples only
  PropagateInfinite,  // singular trials enter the statistics as +inf
};

std::string to_string(SingularPolicy policy);

struct RunOptions {
  std::size_t trials = 2000;
  SingularPolicy policy = SingularPolicy::ExcludeAndCount;
  unsigned threads = 0;
  // AGDOP above this counts as "huge" for the practical-connectivity check.
  double huge_agdop = 100.0;
  bool keep_samples = false;
};

// Linear-interpolation quantiles of the sorted sample (type 7). Throws
// InputError on an empty or non-finite sample or q outside [0, 1].
std::vector<double> quantiles(std::span<const double> samples, std::span<const double> q);

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  // Tukey whiskers: the extreme samples within 1.5 IQR of the box.
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::size_t outliers = 0;  // samples beyond q3 + 1.5 IQR
};

BoxStats box_stats(std::span<const double> samples);

struct ConfigSummary {
  std::string model;
  std::string params;
  std::size_t n_sensors = 0;
  std::size_t n_anchors = 0;
  int dim = 2;
  // Mean realized degrees over the trials that entered the statistics.
  double delta_s = 0.0;
  double delta_a = 0.0;
  double lb = 0.0;
  double agdop_mean = 0.0;
  BoxStats agdop;
  double singular_fraction = 0.0;
  // Fraction of trials that were singular or had AGDOP above RunOptions::huge_agdop.
  double huge_fraction = 0.0;
  std::size_t trials = 0;
  std::size_t finite_trials = 0;
  bool likely_infinite = false;
  std::string status = "ok";  // anything else marks a failed grid point
  std::vector<double> samples;  // filled when RunOptions::keep_samples
};

// Trial t of this config uses generator stream (seed, t). The bound is
// evaluated at the mean realized degrees of the trials that entered the
// statistics. Throws ComputationError when every trial is singular under
// ExcludeAndCount.
ConfigSummary run_config(const GraphModelSpec& spec, const RunOptions& opts, std::uint64_t seed);

// One grid point: the pooled summary plus the same trials grouped by their
// exact realized (delta_s, delta_a). Within a group every instance has the
// same degrees, so the group's bound is the bound at each instance's own
// degrees. Groups whose
// trials are all singular are dropped (ExcludeAndCount) and counted.
struct SweepPoint {
  ConfigSummary pooled;
  std::vector<ConfigSummary> degree_bins;
  std::size_t dropped_bins = 0;
};

SweepPoint run_config_binned(const GraphModelSpec& spec, const RunOptions& opts, std::uint64_t seed);

// Grid point i is run with seed derive_seed(master_seed, i). A failing point
// yields a summary whose status carries the error; the sweep continues.
std::vector<ConfigSummary> run_sweep(std::span<const GraphModelSpec> grid, const RunOptions& opts,
                                     std::uint64_t master_seed);
// As run_sweep, keeping the per-degree groups. A failed point has no groups.
std::vector<SweepPoint> run_sweep_binned(std::span<const GraphModelSpec> grid, const RunOptions& opts,
                                         std::uint64_t master_seed);

}  // namespace coloc
