#pragma once

// Seeded Monte Carlo simulation of a transition matrix, used as an
// independent statistical check on the linear-algebra results.
//
// Randomness: trial i of a run with seed s draws from xoshiro256** seeded by
// four successive SplitMix64 outputs starting at trial_seed(s, i), where
// trial_seed(s, i) = splitmix64_mix(s + (i + 1) * 0x9E3779B97F4A7C15).
// Results therefore depend only on (matrix, start, trials/steps, seed) and
// are identical across platforms and across any split of the trials.

#include <cstdint>
#include <vector>

#include "markov/chain.hpp"

namespace markov {

/// SplitMix64 finaliser (Steele, Lea and Flood constants).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64_mix(seed + (trial + 1) * 0x9E3779B97F4A7C15ULL);
}

/// xoshiro256** 1.0 (Blackman and Vigna).
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();

 private:
  std::uint64_t s_[4];
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t steps = 0;  // per trial; 0 for absorbing runs
  std::vector<std::uint64_t> visit_counts;  // per state, start occupancy included
  // Absorbing runs only, one entry per trial.
  std::vector<std::uint32_t> absorption_state;
  std::vector<std::uint64_t> absorption_time;  // moves until a recurrent state
  // Ergodic runs only: visit_counts / (trials * (steps + 1)).
  std::vector<double> frequencies;

  double mean_absorption_time() const;
  /// Sample standard deviation of absorption_time.
  double stddev_absorption_time() const;
  /// Fraction of trials that ended in `state`.
  double absorption_rate(std::size_t state) const;

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

/// Row-wise cumulative distributions for inverse-CDF sampling.
class RowSampler {
 public:
  explicit RowSampler(const TransitionMatrix<double>& p);
  std::size_t next(std::size_t state, double u) const;
  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<std::vector<double>> cdf_;
  std::vector<std::size_t> last_positive_;
};

/// Runs each trial from `start` until it first enters a recurrent state.
/// Throws StartNotTransient when `start` is recurrent.
SimulationResult simulate_absorbing(const TransitionMatrix<double>& p, std::size_t start,
                                    std::uint64_t trials, std::uint64_t seed);

/// Runs `trials` independent walks of `steps` moves from `start` and pools
/// the landing counts. Throws StartNotRecurrent when `start` is transient.
SimulationResult simulate_ergodic(const TransitionMatrix<double>& p, std::size_t start,
                                  std::uint64_t steps, std::uint64_t trials, std::uint64_t seed);

inline SimulationResult simulate_absorbing(const TransitionMatrix<Rational>& p, std::size_t start,
                                           std::uint64_t trials, std::uint64_t seed) {
  return simulate_absorbing(to_double(p), start, trials, seed);
}

inline SimulationResult simulate_ergodic(const TransitionMatrix<Rational>& p, std::size_t start,
                                         std::uint64_t steps, std::uint64_t trials,
                                         std::uint64_t seed) {
  return simulate_ergodic(to_double(p), start, steps, trials, seed);
}

}  // namespace markov
