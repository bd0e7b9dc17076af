#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace ptcure {

// Deterministic random source; one instance per chain or replicate.
// Distribution objects are created per call so that no draw leaks state
// into the next one and a given seed always yields the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1]; never returns 0 so logs of draws stay finite.
  double uniform() {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double u = dist(engine_);
    return u > 0.0 ? u : std::numeric_limits<double>::min();
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> dist(mean, sd);
    return dist(engine_);
  }

  // Gamma in shape/rate form, matching the hyperprior conventions.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(engine_);
  }

  int poisson(double mean) {
    std::poisson_distribution<int> dist(mean);
    return dist(engine_);
  }

  int bernoulli(double prob) {
    std::bernoulli_distribution dist(prob);
    return dist(engine_) ? 1 : 0;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Child seed for stream `index` derived from a master seed.  Streams are
// the SplitMix64 outputs at states master + (index + 1) * golden gamma, so
// replicates get well-separated seeds no matter how work is scheduled.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  state = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9ULL;
  state = (state ^ (state >> 27)) * 0x94D049BB133111EBULL;
  return state ^ (state >> 31);
}

}  // namespace ptcure
