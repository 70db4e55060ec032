#include "markov/scalar.hpp"

#include <cctype>
#include <limits>

#include "markov/error.hpp"

namespace markov {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotARecurrentClass: return "NotARecurrentClass";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::EmptyTransientSet: return "EmptyTransientSet";
    case ErrorCode::InvalidMoveDistribution: return "InvalidMoveDistribution";
    case ErrorCode::NoForwardMotion: return "NoForwardMotion";
    case ErrorCode::NegativeDisplacement: return "NegativeDisplacement";
    case ErrorCode::TooFewSquares: return "TooFewSquares";
    case ErrorCode::InvalidSquare: return "InvalidSquare";
    case ErrorCode::SelfRedirect: return "SelfRedirect";
    case ErrorCode::InvalidDeck: return "InvalidDeck";
    case ErrorCode::DestinationResolution: return "DestinationResolution";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::StartNotTransient: return "StartNotTransient";
    case ErrorCode::StartNotRecurrent: return "StartNotRecurrent";
    case ErrorCode::MultipleRecurrentClasses: return "MultipleRecurrentClasses";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

double to_double(const Rational& v) {
  // mpq_get_d truncates toward zero; step to the neighbour when it is closer.
  const double truncated = v.get_d();
  if (!std::isfinite(truncated)) return truncated;
  const double away = std::nextafter(
      truncated, sgn(v) >= 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity());
  if (!std::isfinite(away)) return truncated;
  const Rational err_trunc = abs(v - Rational(truncated));
  const Rational err_away = abs(v - Rational(away));
  return err_away < err_trunc ? away : truncated;
}

std::string to_string(const Rational& v) {
  Rational c = v;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  auto digits_ok = [](const std::string& s, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false)) {
    throw Error(ErrorCode::InvalidArgument, "malformed rational literal '" + text + "'");
  }
  mpz_class n(num[0] == '+' ? num.substr(1) : num, 10);
  mpz_class d(den, 10);
  if (d == 0) {
    throw Error(ErrorCode::InvalidArgument, "zero denominator in '" + text + "'");
  }
  Rational q(n, d);
  q.canonicalize();
  return q;
}

}  // namespace markov
