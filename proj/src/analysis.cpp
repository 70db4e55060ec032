#include "markov/analysis.hpp"

#include <algorithm>

namespace markov {

template <class T>
std::vector<T> ChainAnalysis<T>::expected_visits_from(std::size_t start) const {
  if (!fundamental) {
    throw Error(ErrorCode::EmptyTransientSet, "chain has no transient states");
  }
  const auto& states = fundamental->states;
  const auto it = std::find(states.begin(), states.end(), start);
  if (it == states.end()) {
    throw Error(ErrorCode::StartNotTransient,
                "state " + std::to_string(start + 1) + " is not transient");
  }
  const auto row = static_cast<std::size_t>(it - states.begin());
  std::vector<T> out(p.size(), ScalarTraits<T>::zero());
  for (std::size_t j = 0; j < states.size(); ++j) out[states[j]] = fundamental->e(row, j);
  return out;
}

template <class T>
ChainAnalysis<T> analyze(const TransitionMatrix<T>& p) {
  ChainAnalysis<T> a(p);
  a.classification = classify_states(p);
  a.canonical = canonical_form(p, a.classification);
  if (a.canonical.t > 0) {
    a.fundamental = fundamental_matrix(a.canonical);
    a.absorption = absorption_probabilities(a.canonical, *a.fundamental);
    a.absorption_times = expected_absorption_time(*a.fundamental);
  }
  for (const RecurrentClass& rc : a.classification.recurrent_classes) {
    if (rc.absorbing) continue;
    a.stationary.push_back(stationary_distribution(p, a.classification, rc.states));
  }
  a.doubly_stochastic = is_doubly_stochastic(p);
  return a;
}

template struct ChainAnalysis<double>;
template struct ChainAnalysis<Rational>;
template ChainAnalysis<double> analyze(const TransitionMatrix<double>&);
template ChainAnalysis<Rational> analyze(const TransitionMatrix<Rational>&);

}  // namespace markov
