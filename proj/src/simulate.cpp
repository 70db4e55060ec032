#include "markov/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace markov {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t z = seed;
  for (auto& word : s_) {
    z += 0x9E3779B97F4A7C15ULL;
    word = splitmix64_mix(z);
  }
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

RowSampler::RowSampler(const TransitionMatrix<double>& p) {
  const std::size_t n = p.size();
  cdf_.assign(n, std::vector<double>(n, 0.0));
  last_positive_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += p(i, j);
      cdf_[i][j] = acc;
      if (p(i, j) > 0.0) last_positive_[i] = j;
    }
  }
}

std::size_t RowSampler::next(std::size_t state, double u) const {
  const auto& row = cdf_[state];
  const auto it = std::upper_bound(row.begin(), row.end(), u);
  const auto j = static_cast<std::size_t>(it - row.begin());
  // Round-off can leave the final cumulative value just under 1.
  return std::min(j, last_positive_[state]);
}

double SimulationResult::mean_absorption_time() const {
  if (absorption_time.empty()) return 0.0;
  long double sum = 0;
  for (auto t : absorption_time) sum += static_cast<long double>(t);
  return static_cast<double>(sum / static_cast<long double>(absorption_time.size()));
}

double SimulationResult::stddev_absorption_time() const {
  const std::size_t m = absorption_time.size();
  if (m < 2) return 0.0;
  const double mean = mean_absorption_time();
  long double ss = 0;
  for (auto t : absorption_time) {
    const long double d = static_cast<long double>(t) - mean;
    ss += d * d;
  }
  return std::sqrt(static_cast<double>(ss / static_cast<long double>(m - 1)));
}

double SimulationResult::absorption_rate(std::size_t state) const {
  if (absorption_state.empty()) return 0.0;
  const auto hits = std::count(absorption_state.begin(), absorption_state.end(), state);
  return static_cast<double>(hits) / static_cast<double>(absorption_state.size());
}

SimulationResult simulate_absorbing(const TransitionMatrix<double>& p, std::size_t start,
                                    std::uint64_t trials, std::uint64_t seed) {
  if (start >= p.size()) {
    throw Error(ErrorCode::InvalidArgument, "start state out of range");
  }
  const StateClassification c = classify_states(p);
  if (c.kind[start] != StateKind::Transient) {
    throw Error(ErrorCode::StartNotTransient,
                "start state " + std::to_string(start + 1) + " is recurrent");
  }
  const RowSampler sampler(p);
  SimulationResult result;
  result.seed = seed;
  result.trials = trials;
  result.visit_counts.assign(p.size(), 0);
  result.absorption_state.reserve(trials);
  result.absorption_time.reserve(trials);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Xoshiro256 rng(trial_seed(seed, trial));
    std::size_t state = start;
    std::uint64_t moves = 0;
    ++result.visit_counts[state];
    while (c.kind[state] == StateKind::Transient) {
      state = sampler.next(state, rng.uniform());
      ++moves;
      ++result.visit_counts[state];
    }
    result.absorption_state.push_back(static_cast<std::uint32_t>(state));
    result.absorption_time.push_back(moves);
  }
  return result;
}

SimulationResult simulate_ergodic(const TransitionMatrix<double>& p, std::size_t start,
                                  std::uint64_t steps, std::uint64_t trials, std::uint64_t seed) {
  if (start >= p.size()) {
    throw Error(ErrorCode::InvalidArgument, "start state out of range");
  }
  const StateClassification c = classify_states(p);
  if (c.kind[start] != StateKind::Recurrent) {
    throw Error(ErrorCode::StartNotRecurrent,
                "start state " + std::to_string(start + 1) + " is transient");
  }
  const RowSampler sampler(p);
  SimulationResult result;
  result.seed = seed;
  result.trials = trials;
  result.steps = steps;
  result.visit_counts.assign(p.size(), 0);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Xoshiro256 rng(trial_seed(seed, trial));
    std::size_t state = start;
    ++result.visit_counts[state];
    for (std::uint64_t k = 0; k < steps; ++k) {
      state = sampler.next(state, rng.uniform());
      ++result.visit_counts[state];
    }
  }
  result.frequencies.assign(p.size(), 0.0);
  const double total = static_cast<double>(trials) * static_cast<double>(steps + 1);
  if (total > 0) {
    for (std::size_t i = 0; i < p.size(); ++i)
      result.frequencies[i] = static_cast<double>(result.visit_counts[i]) / total;
  }
  return result;
}

}  // namespace markov
