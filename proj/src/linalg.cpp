#include "markov/linalg.hpp"

#include <utility>

namespace markov {
namespace {

template <class T>
std::size_t choose_pivot(const Matrix<T>& m, std::size_t col) {
  std::size_t best = m.rows();
  if constexpr (ScalarTraits<T>::exact) {
    for (std::size_t r = col; r < m.rows(); ++r) {
      if (!ScalarTraits<T>::is_zero(m(r, col))) return r;
    }
  } else {
    double best_abs = 0.0;
    for (std::size_t r = col; r < m.rows(); ++r) {
      const double v = std::fabs(m(r, col));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
  }
  return best;
}

// Reduces the augmented system [a | rhs] in place until a is the identity.
template <class T>
void gauss_jordan(Matrix<T>& a, Matrix<T>& rhs) {
  const std::size_t n = a.rows();
  if (a.cols() != n || rhs.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "elimination requires a square system");
  }
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t p = choose_pivot(a, col);
    if (p == n) {
      throw Error(ErrorCode::SingularMatrix,
                  "singular matrix: no pivot in column " + std::to_string(col));
    }
    if (p != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(col, j));
      for (std::size_t j = 0; j < rhs.cols(); ++j) std::swap(rhs(p, j), rhs(col, j));
    }
    const T inv = ScalarTraits<T>::one() / a(col, col);
    for (std::size_t j = 0; j < n; ++j) a(col, j) *= inv;
    for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(col, j) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const T factor = a(r, col);
      if (ScalarTraits<T>::is_zero(factor)) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
      for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(r, j) -= factor * rhs(col, j);
    }
  }
}

}  // namespace

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  Matrix<T> work = a;
  Matrix<T> result = Matrix<T>::identity(a.rows());
  gauss_jordan(work, result);
  return result;
}

template <class T>
std::vector<T> solve(const Matrix<T>& a, const std::vector<T>& b) {
  if (b.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve: right-hand side has wrong length");
  }
  Matrix<T> work = a;
  Matrix<T> rhs(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  gauss_jordan(work, rhs);
  return rhs.column(0);
}

template Matrix<double> inverse(const Matrix<double>&);
template Matrix<Rational> inverse(const Matrix<Rational>&);
template std::vector<double> solve(const Matrix<double>&, const std::vector<double>&);
template std::vector<Rational> solve(const Matrix<Rational>&, const std::vector<Rational>&);

}  // namespace markov
