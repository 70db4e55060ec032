#include "markov/chain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "markov/linalg.hpp"

namespace markov {
namespace {

template <class T>
std::string scalar_str(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return to_string(v);
  } else {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
}

using Adjacency = std::vector<std::vector<std::size_t>>;

template <class T>
Adjacency positive_edges(const TransitionMatrix<T>& p) {
  const std::size_t n = p.size();
  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (ScalarTraits<T>::positive(p(i, j))) adj[i].push_back(j);
  return adj;
}

// Iterative Tarjan; returns the SCC index of every vertex (arbitrary order).
std::vector<std::size_t> strongly_connected_components(const Adjacency& adj,
                                                       std::size_t& count) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (vertex, next edge)
  std::size_t next_index = 0;
  count = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < adj[v].size()) {
        const std::size_t w = adj[v][edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != done);
        ++count;
      }
    }
  }
  return comp;
}

// BFS levels from the first member; the period is the gcd over every
// in-class edge (u, v) of level(u) + 1 - level(v).
std::size_t period_of(const Adjacency& adj, const std::vector<std::size_t>& members,
                      const std::vector<bool>& in_class) {
  constexpr long kUnset = -1;
  std::vector<long> level(adj.size(), kUnset);
  std::vector<std::size_t> queue{members.front()};
  level[members.front()] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t v : adj[u]) {
      if (!in_class[v] || level[v] != kUnset) continue;
      level[v] = level[u] + 1;
      queue.push_back(v);
    }
  }
  long g = 0;
  for (std::size_t u : members) {
    for (std::size_t v : adj[u]) {
      if (!in_class[v]) continue;
      g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
    }
  }
  return g == 0 ? 1 : static_cast<std::size_t>(g);
}

template <class T>
Matrix<T> submatrix(const Matrix<T>& m, std::span<const std::size_t> rows,
                    std::span<const std::size_t> cols) {
  Matrix<T> out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace

template <class T>
std::string TransitionMatrix<T>::label(std::size_t i) const {
  if (i < labels_.size() && !labels_[i].empty()) return labels_[i];
  return std::to_string(i + 1);
}

template <class T>
TransitionMatrix<T> validate_stochastic(Matrix<T> m, std::vector<std::string> labels) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw Error(ErrorCode::NonSquare, "transition matrix must be square and non-empty, got " +
                                          std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
  if (!labels.empty() && labels.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n) + " labels, got " +
                                                  std::to_string(labels.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    T sum = ScalarTraits<T>::zero();
    for (std::size_t j = 0; j < n; ++j) {
      if constexpr (ScalarTraits<T>::exact) m(i, j).canonicalize();
      const T& v = m(i, j);
      if constexpr (!ScalarTraits<T>::exact) {
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::NegativeEntry, "non-finite entry at (" + std::to_string(i) +
                                                    "," + std::to_string(j) + ")");
        }
      }
      if (v < 0) {
        throw Error(ErrorCode::NegativeEntry, "negative entry " + scalar_str(v) + " at (" +
                                                  std::to_string(i) + "," + std::to_string(j) +
                                                  ")");
      }
      sum += v;
    }
    if (!ScalarTraits<T>::near(sum, ScalarTraits<T>::one())) {
      throw Error(ErrorCode::RowSumViolation,
                  "row " + std::to_string(i) + " sums to " + scalar_str(sum) + ", expected 1");
    }
  }
  return TransitionMatrix<T>(std::move(m), std::move(labels));
}

TransitionMatrix<double> to_double(const TransitionMatrix<Rational>& p) {
  return validate_stochastic(to_double(p.matrix()), p.labels());
}

std::size_t StateClassification::class_count() const {
  return class_id.empty() ? 0 : *std::max_element(class_id.begin(), class_id.end()) + 1;
}

std::vector<std::size_t> StateClassification::transient_states() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kind.size(); ++i)
    if (kind[i] == StateKind::Transient) out.push_back(i);
  return out;
}

std::vector<std::size_t> StateClassification::recurrent_states() const {
  std::vector<std::size_t> out;
  for (const auto& rc : recurrent_classes) out.insert(out.end(), rc.states.begin(), rc.states.end());
  return out;
}

std::optional<std::size_t> StateClassification::recurrent_class_of(std::size_t state) const {
  for (std::size_t k = 0; k < recurrent_classes.size(); ++k) {
    const auto& s = recurrent_classes[k].states;
    if (std::binary_search(s.begin(), s.end(), state)) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> StateClassification::find_recurrent_class(
    std::span<const std::size_t> states) const {
  std::vector<std::size_t> sorted(states.begin(), states.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < recurrent_classes.size(); ++k)
    if (recurrent_classes[k].states == sorted) return k;
  return std::nullopt;
}

template <class T>
StateClassification classify_states(const TransitionMatrix<T>& p) {
  const std::size_t n = p.size();
  const Adjacency adj = positive_edges(p);
  std::size_t scc_count = 0;
  const std::vector<std::size_t> scc = strongly_connected_components(adj, scc_count);

  // Renumber components by their smallest member.
  std::vector<std::size_t> first_member(scc_count, n);
  for (std::size_t i = 0; i < n; ++i) first_member[scc[i]] = std::min(first_member[scc[i]], i);
  std::vector<std::size_t> order(scc_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return first_member[a] < first_member[b]; });
  std::vector<std::size_t> renumber(scc_count);
  for (std::size_t k = 0; k < scc_count; ++k) renumber[order[k]] = k;

  StateClassification c;
  c.kind.assign(n, StateKind::Transient);
  c.class_id.resize(n);
  c.is_absorbing.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) c.class_id[i] = renumber[scc[i]];

  std::vector<bool> closed(scc_count, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : adj[i])
      if (c.class_id[j] != c.class_id[i]) closed[c.class_id[i]] = false;

  std::vector<std::vector<std::size_t>> members(scc_count);
  for (std::size_t i = 0; i < n; ++i) members[c.class_id[i]].push_back(i);

  for (std::size_t k = 0; k < scc_count; ++k) {
    if (!closed[k]) continue;
    std::vector<bool> in_class(n, false);
    for (std::size_t s : members[k]) {
      in_class[s] = true;
      c.kind[s] = StateKind::Recurrent;
    }
    RecurrentClass rc;
    rc.states = members[k];
    rc.period = period_of(adj, rc.states, in_class);
    rc.absorbing = rc.states.size() == 1;
    if (rc.absorbing) c.is_absorbing[rc.states.front()] = true;
    c.recurrent_classes.push_back(std::move(rc));
  }
  return c;
}

template <class T>
std::size_t class_period(const TransitionMatrix<T>& p, std::span<const std::size_t> states) {
  const StateClassification c = classify_states(p);
  const auto k = c.find_recurrent_class(states);
  if (!k) throw Error(ErrorCode::NotARecurrentClass, "state set is not a recurrent class");
  return c.recurrent_classes[*k].period;
}

template <class T>
Matrix<T> CanonicalForm<T>::permuted() const {
  const std::size_t n = t + r;
  Matrix<T> m(n, n);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) m(i, j) = pt(i, j);
    for (std::size_t j = 0; j < r; ++j) m(i, t + j) = ptr(i, j);
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) m(t + i, t + j) = pr(i, j);
  return m;
}

template <class T>
CanonicalForm<T> canonical_form(const TransitionMatrix<T>& p, const StateClassification& c) {
  if (c.size() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "classification does not match matrix size");
  }
  CanonicalForm<T> cf;
  cf.permutation = c.transient_states();
  cf.t = cf.permutation.size();
  for (std::size_t k = 0; k < c.recurrent_classes.size(); ++k) {
    for (std::size_t s : c.recurrent_classes[k].states) {
      cf.permutation.push_back(s);
      cf.recurrent_class_of_column.push_back(k);
    }
  }
  cf.r = cf.permutation.size() - cf.t;
  cf.recurrent_class_count = c.recurrent_classes.size();
  if (cf.permutation.size() != p.size()) {
    throw Error(ErrorCode::InternalInconsistency, "classification does not partition the states");
  }

  const auto transient = cf.transient_states();
  const auto recurrent = cf.recurrent_states();
  for (std::size_t i : recurrent) {
    for (std::size_t j : transient) {
      if (!ScalarTraits<T>::is_zero(p(i, j))) {
        throw Error(ErrorCode::InternalInconsistency,
                    "recurrent state " + std::to_string(i) + " reaches transient state " +
                        std::to_string(j));
      }
    }
  }
  cf.pt = submatrix(p.matrix(), transient, transient);
  cf.ptr = submatrix(p.matrix(), transient, recurrent);
  cf.pr = submatrix(p.matrix(), recurrent, recurrent);
  return cf;
}

template <class T>
FundamentalMatrix<T> fundamental_matrix(const CanonicalForm<T>& cf) {
  if (cf.t == 0) throw Error(ErrorCode::EmptyTransientSet, "chain has no transient states");
  FundamentalMatrix<T> fm;
  try {
    fm.e = inverse(Matrix<T>::identity(cf.t) - cf.pt);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::SingularMatrix) throw;
    throw Error(ErrorCode::InternalInconsistency,
                std::string("I - P_T is singular for a transient block: ") + err.what());
  }
  const auto ts = cf.transient_states();
  fm.states.assign(ts.begin(), ts.end());
  return fm;
}

template <class T>
AbsorptionMatrix<T> absorption_probabilities(const CanonicalForm<T>& cf,
                                             const FundamentalMatrix<T>& e) {
  if (cf.t == 0) throw Error(ErrorCode::EmptyTransientSet, "chain has no transient states");
  if (e.e.rows() != cf.t || e.e.cols() != cf.t) {
    throw Error(ErrorCode::DimensionMismatch, "fundamental matrix does not match canonical form");
  }
  AbsorptionMatrix<T> am;
  am.f = e.e * cf.ptr;
  am.by_class = Matrix<T>(cf.t, cf.recurrent_class_count);
  for (std::size_t i = 0; i < cf.t; ++i)
    for (std::size_t j = 0; j < cf.r; ++j)
      am.by_class(i, cf.recurrent_class_of_column[j]) += am.f(i, j);
  const auto ts = cf.transient_states();
  const auto rs = cf.recurrent_states();
  am.transient_states.assign(ts.begin(), ts.end());
  am.recurrent_states.assign(rs.begin(), rs.end());
  return am;
}

template <class T>
std::vector<T> expected_absorption_time(const FundamentalMatrix<T>& e) {
  std::vector<T> out(e.e.rows(), ScalarTraits<T>::zero());
  for (std::size_t i = 0; i < e.e.rows(); ++i)
    for (std::size_t j = 0; j < e.e.cols(); ++j) out[i] += e.e(i, j);
  return out;
}

template <class T>
StationaryVector<T> stationary_distribution(const TransitionMatrix<T>& p,
                                            const StateClassification& c,
                                            std::span<const std::size_t> states) {
  const auto k = c.find_recurrent_class(states);
  if (!k) throw Error(ErrorCode::NotARecurrentClass, "state set is not a recurrent class");
  const RecurrentClass& rc = c.recurrent_classes[*k];
  const std::size_t m = rc.states.size();

  // Row i of the system: sum_j pi_j p(j, i) - pi_i = 0; last row: sum pi = 1.
  Matrix<T> a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = p(rc.states[j], rc.states[i]);
  for (std::size_t i = 0; i < m; ++i) a(i, i) -= ScalarTraits<T>::one();
  for (std::size_t j = 0; j < m; ++j) a(m - 1, j) = ScalarTraits<T>::one();
  std::vector<T> rhs(m, ScalarTraits<T>::zero());
  rhs[m - 1] = ScalarTraits<T>::one();

  std::vector<T> x;
  try {
    x = solve(a, rhs);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::SingularMatrix) throw;
    throw Error(ErrorCode::InternalInconsistency,
                std::string("stationary system singular for a recurrent class: ") + err.what());
  }

  StationaryVector<T> sv;
  sv.pi.assign(p.size(), ScalarTraits<T>::zero());
  for (std::size_t i = 0; i < m; ++i) sv.pi[rc.states[i]] = x[i];
  if constexpr (!ScalarTraits<T>::exact) {
    // Round-off can leave tiny negatives on near-zero entries.
    for (std::size_t s : rc.states) sv.pi[s] = std::max(sv.pi[s], 0.0);
  }
  sv.restricted_to = rc.states;
  sv.period = rc.period;
  return sv;
}

template <class T>
bool is_doubly_stochastic(const TransitionMatrix<T>& p) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    T sum = ScalarTraits<T>::zero();
    for (std::size_t i = 0; i < p.size(); ++i) sum += p(i, j);
    if (!ScalarTraits<T>::near(sum, ScalarTraits<T>::one())) return false;
  }
  return true;
}

template <class T>
double stationary_residual(const TransitionMatrix<T>& p, const std::vector<T>& pi) {
  if (pi.size() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "stationary vector has wrong length");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    T acc = ScalarTraits<T>::zero();
    for (std::size_t i = 0; i < p.size(); ++i) acc += pi[i] * p(i, j);
    acc -= pi[j];
    worst = std::max(worst, std::fabs(to_double(acc)));
  }
  return worst;
}

#define MARKOV_INSTANTIATE_CHAIN(T)                                                           \
  template class TransitionMatrix<T>;                                                         \
  template TransitionMatrix<T> validate_stochastic(Matrix<T>, std::vector<std::string>);      \
  template StateClassification classify_states(const TransitionMatrix<T>&);                   \
  template std::size_t class_period(const TransitionMatrix<T>&, std::span<const std::size_t>); \
  template struct CanonicalForm<T>;                                                           \
  template CanonicalForm<T> canonical_form(const TransitionMatrix<T>&,                        \
                                           const StateClassification&);                       \
  template FundamentalMatrix<T> fundamental_matrix(const CanonicalForm<T>&);                  \
  template AbsorptionMatrix<T> absorption_probabilities(const CanonicalForm<T>&,              \
                                                        const FundamentalMatrix<T>&);         \
  template std::vector<T> expected_absorption_time(const FundamentalMatrix<T>&);              \
  template StationaryVector<T> stationary_distribution(                                       \
      const TransitionMatrix<T>&, const StateClassification&, std::span<const std::size_t>);  \
  template bool is_doubly_stochastic(const TransitionMatrix<T>&);                             \
  template double stationary_residual(const TransitionMatrix<T>&, const std::vector<T>&);

MARKOV_INSTANTIATE_CHAIN(double)
MARKOV_INSTANTIATE_CHAIN(Rational)

#undef MARKOV_INSTANTIATE_CHAIN

}  // namespace markov
