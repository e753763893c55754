#pragma once

#include <cstdint>
#include <random>

namespace resparse {

using Seed = std::uint64_t;

// Mixes a seed with a stream tag so independent consumers (rounds, buckets,
// replays) get decorrelated generators that do not depend on call order or
// thread count.
Seed derive_seed(Seed seed, std::uint64_t tag);
Seed derive_seed(Seed seed, std::uint64_t tag, std::uint64_t subtag);

// Thin wrapper over mt19937_64. All conversions to floating point are done
// here rather than with <random> distributions, whose output is
// implementation-defined; this keeps outputs identical across toolchains.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_closed();
  // Exp(rate) via inverse CDF.
  double exponential(double rate = 1.0);
  double gaussian();
  // +1 or -1 with equal probability.
  double sign();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace resparse
