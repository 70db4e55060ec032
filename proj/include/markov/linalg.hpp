#pragma once

#include <vector>

#include "markov/matrix.hpp"

namespace markov {

// Gauss-Jordan elimination. The float backend uses partial pivoting on the
// largest magnitude; the exact backend takes the first nonzero pivot, which
// keeps the elimination exact. Both throw SingularMatrix on a zero pivot.

template <class T>
Matrix<T> inverse(const Matrix<T>& a);

/// Solves a x = b for a square a.
template <class T>
std::vector<T> solve(const Matrix<T>& a, const std::vector<T>& b);

extern template Matrix<double> inverse(const Matrix<double>&);
extern template Matrix<Rational> inverse(const Matrix<Rational>&);
extern template std::vector<double> solve(const Matrix<double>&, const std::vector<double>&);
extern template std::vector<Rational> solve(const Matrix<Rational>&,
                                            const std::vector<Rational>&);

}  // namespace markov
