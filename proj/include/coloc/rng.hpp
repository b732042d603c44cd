#pragma once

// Platform-independent random streams.
//
// std::*_distribution output is implementation-defined, so the samplers here
// are written out explicitly. Every stream is a pure function of
// (master seed, stream index), which makes trial i reproduce identically no
// matter which worker runs it or in what order.

#include <cstdint>
#include <limits>

namespace coloc {

inline constexpr std::uint64_t kDefaultSeed = 20130601;

std::uint64_t splitmix64(std::uint64_t& state);

// Seed of sub-stream `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = kDefaultSeed);

  // Independent sub-stream, e.g. one per trial.
  static Rng stream(std::uint64_t master, std::uint64_t index) { return Rng(derive_seed(master, index)); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace coloc
