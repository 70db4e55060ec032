#pragma once

#include <optional>
#include <vector>

#include "markov/chain.hpp"

namespace markov {

/// Everything chain_core can say about one transition matrix.
template <class T>
struct ChainAnalysis {
  explicit ChainAnalysis(TransitionMatrix<T> matrix) : p(std::move(matrix)) {}

  TransitionMatrix<T> p;
  StateClassification classification;
  CanonicalForm<T> canonical;
  std::optional<FundamentalMatrix<T>> fundamental;  // when transient states exist
  std::optional<AbsorptionMatrix<T>> absorption;
  std::vector<T> absorption_times;
  /// One entry per recurrent class with more than one state; absorbing
  /// singletons carry no information beyond their absorption probability.
  std::vector<StationaryVector<T>> stationary;
  bool doubly_stochastic = false;

  /// Row of E for `start`, scattered into a length-n vector (0 elsewhere).
  std::vector<T> expected_visits_from(std::size_t start) const;
};

template <class T>
ChainAnalysis<T> analyze(const TransitionMatrix<T>& p);

extern template struct ChainAnalysis<double>;
extern template struct ChainAnalysis<Rational>;
extern template ChainAnalysis<double> analyze(const TransitionMatrix<double>&);
extern template ChainAnalysis<Rational> analyze(const TransitionMatrix<Rational>&);

}  // namespace markov
