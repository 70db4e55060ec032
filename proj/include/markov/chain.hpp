#pragma once

// Finite stationary Markov chain analysis: state classification, the
// transient/recurrent block decomposition, the fundamental matrix, absorption
// probabilities and per-class stationary vectors.
//
// States are 0-based matrix indices throughout this header. Every template
// is instantiated for double (float backend) and Rational (exact backend).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "markov/matrix.hpp"

namespace markov {

template <class T>
class TransitionMatrix;

/// Checks squareness, non-negativity and unit row sums (exact for Rational,
/// within kFloatTolerance for double). Labels, when given, must number n.
template <class T>
TransitionMatrix<T> validate_stochastic(Matrix<T> m, std::vector<std::string> labels = {});

/// Square row-stochastic matrix. Only obtainable through validate_stochastic,
/// so holding one means the invariants were checked.
template <class T>
class TransitionMatrix {
 public:
  std::size_t size() const noexcept { return p_.rows(); }
  const T& operator()(std::size_t i, std::size_t j) const { return p_(i, j); }
  const Matrix<T>& matrix() const noexcept { return p_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Label of state i, or its 1-based number when unlabelled.
  std::string label(std::size_t i) const;

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.p_ == b.p_;
  }

 private:
  friend TransitionMatrix validate_stochastic<T>(Matrix<T>, std::vector<std::string>);

  TransitionMatrix(Matrix<T> p, std::vector<std::string> labels)
      : p_(std::move(p)), labels_(std::move(labels)) {}

  Matrix<T> p_;
  std::vector<std::string> labels_;
};

TransitionMatrix<double> to_double(const TransitionMatrix<Rational>& p);
inline const TransitionMatrix<double>& to_double(const TransitionMatrix<double>& p) { return p; }

enum class StateKind { Transient, Recurrent };

struct RecurrentClass {
  std::vector<std::size_t> states;  // ascending
  std::size_t period = 1;
  bool absorbing = false;  // single state with self-probability 1
};

struct StateClassification {
  std::vector<StateKind> kind;
  std::vector<std::size_t> class_id;  // communicating class, numbered by smallest member
  std::vector<RecurrentClass> recurrent_classes;  // ordered by smallest member
  std::vector<bool> is_absorbing;

  std::size_t size() const noexcept { return kind.size(); }
  std::size_t class_count() const;
  std::vector<std::size_t> transient_states() const;
  std::vector<std::size_t> recurrent_states() const;
  /// Index into recurrent_classes for a recurrent state.
  std::optional<std::size_t> recurrent_class_of(std::size_t state) const;
  /// Index into recurrent_classes whose state set equals `states`.
  std::optional<std::size_t> find_recurrent_class(std::span<const std::size_t> states) const;
};

/// SCCs of the positive-probability digraph; closed SCCs are recurrent
/// classes, the rest of the states are transient.
template <class T>
StateClassification classify_states(const TransitionMatrix<T>& p);

/// gcd of return-time lengths of a recurrent class (1 = aperiodic).
/// Throws NotARecurrentClass when `states` is not exactly a recurrent class.
template <class T>
std::size_t class_period(const TransitionMatrix<T>& p, std::span<const std::size_t> states);

template <class T>
struct CanonicalForm {
  /// permutation[k] is the original state placed at position k: transient
  /// states first (ascending), then recurrent states grouped by class.
  std::vector<std::size_t> permutation;
  std::size_t t = 0;
  std::size_t r = 0;
  Matrix<T> pt;   // t x t
  Matrix<T> ptr;  // t x r
  Matrix<T> pr;   // r x r
  /// For each recurrent column, its index into StateClassification::recurrent_classes.
  std::vector<std::size_t> recurrent_class_of_column;
  std::size_t recurrent_class_count = 0;

  std::span<const std::size_t> transient_states() const {
    return std::span<const std::size_t>(permutation).first(t);
  }
  std::span<const std::size_t> recurrent_states() const {
    return std::span<const std::size_t>(permutation).subspan(t);
  }
  /// The whole matrix reordered by `permutation`.
  Matrix<T> permuted() const;
};

template <class T>
CanonicalForm<T> canonical_form(const TransitionMatrix<T>& p, const StateClassification& c);

template <class T>
struct FundamentalMatrix {
  Matrix<T> e;  // t x t, basis = transient states in canonical order
  std::vector<std::size_t> states;
};

/// (I - P_T)^-1. Entry (i, j) counts expected visits to j from i, including
/// the starting occupancy when i == j.
template <class T>
FundamentalMatrix<T> fundamental_matrix(const CanonicalForm<T>& cf);

template <class T>
struct AbsorptionMatrix {
  Matrix<T> f;         // t x r
  Matrix<T> by_class;  // t x (number of recurrent classes)
  std::vector<std::size_t> transient_states;
  std::vector<std::size_t> recurrent_states;
};

/// F = E * P_TR, plus the per-class column aggregation.
template <class T>
AbsorptionMatrix<T> absorption_probabilities(const CanonicalForm<T>& cf,
                                             const FundamentalMatrix<T>& e);

/// Row sums of E: expected number of moves before entering a recurrent class.
template <class T>
std::vector<T> expected_absorption_time(const FundamentalMatrix<T>& e);

template <class T>
struct StationaryVector {
  std::vector<T> pi;                     // length n, zero outside the class
  std::vector<std::size_t> restricted_to;  // ascending
  std::size_t period = 1;
};

/// Solves pi^T P = pi^T on one recurrent class via a direct linear solve
/// with one balance equation replaced by the normalisation row.
template <class T>
StationaryVector<T> stationary_distribution(const TransitionMatrix<T>& p,
                                            const StateClassification& c,
                                            std::span<const std::size_t> states);

template <class T>
bool is_doubly_stochastic(const TransitionMatrix<T>& p);

/// Max-norm of pi^T P - pi^T.
template <class T>
double stationary_residual(const TransitionMatrix<T>& p, const std::vector<T>& pi);

}  // namespace markov
