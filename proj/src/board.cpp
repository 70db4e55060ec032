#include "markov/board.hpp"

#include <algorithm>
#include <set>

namespace markov {
namespace {

void check_square(int square, int squares, const char* what) {
  if (square < 1 || square > squares) {
    throw Error(ErrorCode::InvalidSquare, std::string(what) + " square " + std::to_string(square) +
                                              " outside 1.." + std::to_string(squares));
  }
}

// 1-based wraparound.
int wrap(long square, int squares) {
  long m = (square - 1) % squares;
  if (m < 0) m += squares;
  return static_cast<int>(m) + 1;
}

std::size_t idx(int square) { return static_cast<std::size_t>(square - 1); }

}  // namespace

MoveDistribution::MoveDistribution(std::map<int, Rational> probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.empty()) {
    throw Error(ErrorCode::InvalidMoveDistribution, "move distribution is empty");
  }
  Rational total = 0;
  for (auto& [d, p] : probs_) {
    p.canonicalize();
    if (sgn(p) < 0) {
      throw Error(ErrorCode::InvalidMoveDistribution,
                  "negative probability " + to_string(p) + " for displacement " +
                      std::to_string(d));
    }
    total += p;
  }
  if (total != 1) {
    throw Error(ErrorCode::InvalidMoveDistribution,
                "move probabilities sum to " + to_string(total) + ", expected 1");
  }
}

MoveDistribution MoveDistribution::dice(int count, int sides) {
  if (count < 1 || sides < 1) {
    throw Error(ErrorCode::InvalidArgument, "dice need at least one die with one face");
  }
  std::map<int, mpz_class> ways{{0, 1}};
  for (int die = 0; die < count; ++die) {
    std::map<int, mpz_class> next;
    for (const auto& [total, w] : ways)
      for (int face = 1; face <= sides; ++face) next[total + face] += w;
    ways = std::move(next);
  }
  mpz_class outcomes = 1;
  for (int die = 0; die < count; ++die) outcomes *= sides;
  std::map<int, Rational> probs;
  for (const auto& [total, w] : ways) probs[total] = Rational(w, outcomes);
  return MoveDistribution(std::move(probs));
}

Rational MoveDistribution::probability(int displacement) const {
  const auto it = probs_.find(displacement);
  return it == probs_.end() ? Rational(0) : it->second;
}

bool MoveDistribution::has_forward_motion() const {
  return std::any_of(probs_.begin(), probs_.end(),
                     [](const auto& kv) { return kv.first > 0 && sgn(kv.second) > 0; });
}

bool MoveDistribution::has_backward_motion() const {
  return std::any_of(probs_.begin(), probs_.end(),
                     [](const auto& kv) { return kv.first < 0 && sgn(kv.second) > 0; });
}

int CardDeck::movement_count() const {
  int total = 0;
  for (const Card& c : movement) total += c.count;
  return total;
}

void CardDeck::validate() const {
  if (size < 1) throw Error(ErrorCode::InvalidDeck, "deck size must be positive");
  long total = 0;
  for (const Card& c : movement) {
    if (c.count < 0) throw Error(ErrorCode::InvalidDeck, "card count must be non-negative");
    total += c.count;
  }
  if (total > size) {
    throw Error(ErrorCode::InvalidDeck, "deck has " + std::to_string(total) +
                                            " movement cards, exceeding size " +
                                            std::to_string(size));
  }
}

int resolve_destination(const Destination& d, int square, int squares) {
  return std::visit(
      [&](const auto& dest) -> int {
        using D = std::decay_t<decltype(dest)>;
        if constexpr (std::is_same_v<D, FixedSquare>) {
          check_square(dest.square, squares, "card destination");
          return dest.square;
        } else if constexpr (std::is_same_v<D, GoBack>) {
          return wrap(static_cast<long>(square) - dest.squares, squares);
        } else {
          if (dest.squares.empty()) {
            throw Error(ErrorCode::DestinationResolution, "nearest-of card has no candidates");
          }
          for (int s : dest.squares) check_square(s, squares, "nearest-of candidate");
          int best = dest.squares.front();
          int best_distance = squares + 1;
          for (int s : dest.squares) {
            int distance = wrap(static_cast<long>(s) - square, squares) - 1;
            if (distance == 0) distance = squares;  // strictly ahead
            if (distance < best_distance) {
              best_distance = distance;
              best = s;
            }
          }
          return best;
        }
      },
      d);
}

CardDeck default_chance_deck() {
  CardDeck deck = single_railroad_chance_deck();
  deck.movement[6].count = 2;  // the physical deck prints Nearest Railroad twice
  return deck;
}

CardDeck single_railroad_chance_deck() {
  CardDeck deck;
  deck.size = 16;
  deck.movement = {
      {FixedSquare{1}, 1},                    // Advance to Go
      {FixedSquare{11}, 1},                   // Go to Jail
      {FixedSquare{25}, 1},                   // Advance to Illinois Ave.
      {FixedSquare{12}, 1},                   // Advance to St. Charles Place
      {FixedSquare{40}, 1},                   // Advance to Boardwalk
      {FixedSquare{6}, 1},                    // Ride the Reading Railroad
      {NearestOf{{6, 16, 26, 36}}, 1},        // Nearest railroad
      {NearestOf{{13, 29}}, 1},               // Nearest utility
      {GoBack{3}, 1},                         // Go back three spaces
  };
  return deck;
}

CardDeck default_community_chest_deck() {
  CardDeck deck;
  deck.size = 16;
  deck.movement = {
      {FixedSquare{1}, 1},   // Advance to Go
      {FixedSquare{11}, 1},  // Go to Jail
  };
  return deck;
}

std::vector<std::string> monopoly_square_names() {
  return {"Go",
          "Mediterranean Ave.",
          "Community Chest",
          "Baltic Ave.",
          "Income Tax",
          "Reading Railroad",
          "Oriental Ave.",
          "Chance",
          "Vermont Ave.",
          "Connecticut Ave.",
          "Jail",
          "St. Charles Place",
          "Electric Company",
          "States Ave.",
          "Virginia Ave.",
          "Pennsylvania Railroad",
          "St. James Place",
          "Community Chest",
          "Tennessee Ave.",
          "New York Ave.",
          "Free Parking",
          "Kentucky Ave.",
          "Chance",
          "Indiana Ave.",
          "Illinois Ave.",
          "B&O Railroad",
          "Atlantic Ave.",
          "Ventnor Ave.",
          "Water Works",
          "Marvin Gardens",
          "Go To Jail",
          "Pacific Ave.",
          "North Carolina Ave.",
          "Community Chest",
          "Pennsylvania Ave.",
          "Short Line",
          "Chance",
          "Park Place",
          "Luxury Tax",
          "Boardwalk"};
}

TransitionMatrix<Rational> bounded_walk_board(int squares, const MoveDistribution& moves,
                                              OvershootPolicy policy) {
  if (squares < 2) {
    throw Error(ErrorCode::TooFewSquares, "linear board needs at least 2 squares");
  }
  if (moves.entries().empty()) {
    throw Error(ErrorCode::InvalidMoveDistribution, "move distribution is empty");
  }
  const auto n = static_cast<std::size_t>(squares);
  Matrix<Rational> p(n, n);
  for (int k = 1; k < squares; ++k) {
    for (const auto& [d, prob] : moves.entries()) {
      const long dest = static_cast<long>(k) + d;
      int landing;
      if (dest > squares) {
        landing = policy == OvershootPolicy::CollapseToEnd ? squares : k;
      } else if (dest < 1) {
        landing = policy == OvershootPolicy::CollapseToEnd ? 1 : k;
      } else {
        landing = static_cast<int>(dest);
      }
      p(idx(k), idx(landing)) += prob;
    }
  }
  p(n - 1, n - 1) = 1;
  return validate_stochastic(std::move(p));
}

TransitionMatrix<Rational> linear_board(int squares, const MoveDistribution& moves,
                                        OvershootPolicy policy) {
  for (const auto& [d, prob] : moves.entries()) {
    if (d < 0) {
      throw Error(ErrorCode::NegativeDisplacement,
                  "linear boards only move forward; got displacement " + std::to_string(d));
    }
  }
  if (!moves.has_forward_motion()) {
    throw Error(ErrorCode::NoForwardMotion, "no positive displacement has positive probability");
  }
  return bounded_walk_board(squares, moves, policy);
}

TransitionMatrix<Rational> gamblers_ruin_board(int squares, const Rational& p_win) {
  if (squares < 3) {
    throw Error(ErrorCode::TooFewSquares, "gambler's ruin board needs at least 3 squares");
  }
  if (p_win < 0 || p_win > 1) {
    throw Error(ErrorCode::InvalidArgument, "p_win must lie in [0, 1], got " + to_string(p_win));
  }
  const auto n = static_cast<std::size_t>(squares);
  Matrix<Rational> p(n, n);
  p(0, 0) = 1;
  p(n - 1, n - 1) = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    p(k, k + 1) = p_win;
    p(k, k - 1) = 1 - p_win;
  }
  return validate_stochastic(std::move(p));
}

TransitionMatrix<Rational> loop_board(int squares, const MoveDistribution& moves) {
  if (squares < 2) throw Error(ErrorCode::TooFewSquares, "loop board needs at least 2 squares");
  if (moves.entries().empty()) {
    throw Error(ErrorCode::InvalidMoveDistribution, "move distribution is empty");
  }
  const auto n = static_cast<std::size_t>(squares);
  Matrix<Rational> p(n, n);
  for (int k = 1; k <= squares; ++k)
    for (const auto& [d, prob] : moves.entries())
      p(idx(k), idx(wrap(static_cast<long>(k) + d, squares))) += prob;
  return validate_stochastic(std::move(p));
}

TransitionMatrix<Rational> make_absorbing(const TransitionMatrix<Rational>& p,
                                          const std::vector<int>& squares) {
  Matrix<Rational> m = p.matrix();
  const int n = static_cast<int>(p.size());
  for (int s : squares) {
    check_square(s, n, "absorbing");
    for (std::size_t j = 0; j < p.size(); ++j) m(idx(s), j) = 0;
    m(idx(s), idx(s)) = 1;
  }
  return validate_stochastic(std::move(m), p.labels());
}

TransitionMatrix<Rational> apply_redirect(const TransitionMatrix<Rational>& p, int source,
                                          int target) {
  const int n = static_cast<int>(p.size());
  check_square(source, n, "redirect source");
  check_square(target, n, "redirect target");
  if (source == target) {
    throw Error(ErrorCode::SelfRedirect, "redirect from square " + std::to_string(source) +
                                             " to itself");
  }
  Matrix<Rational> m = p.matrix();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m(i, idx(target)) += m(i, idx(source));
    m(i, idx(source)) = 0;
  }
  return validate_stochastic(std::move(m), p.labels());
}

TransitionMatrix<Rational> apply_card_deck(const TransitionMatrix<Rational>& p, int square,
                                           const CardDeck& deck) {
  const int n = static_cast<int>(p.size());
  check_square(square, n, "deck");
  deck.validate();
  std::vector<int> destinations;
  destinations.reserve(deck.movement.size());
  for (const Card& card : deck.movement)
    destinations.push_back(resolve_destination(card.destination, square, n));

  Matrix<Rational> m = p.matrix();
  const std::vector<Rational> landing = m.column(idx(square));
  const Rational keep(deck.stay_count(), deck.size);
  for (std::size_t i = 0; i < p.size(); ++i) m(i, idx(square)) = landing[i] * keep;
  for (std::size_t c = 0; c < deck.movement.size(); ++c) {
    const Rational share(deck.movement[c].count, deck.size);
    if (sgn(share) == 0) continue;
    for (std::size_t i = 0; i < p.size(); ++i) m(i, idx(destinations[c])) += landing[i] * share;
  }
  return validate_stochastic(std::move(m), p.labels());
}

TransitionMatrix<Rational> apply_surgeries(const TransitionMatrix<Rational>& p,
                                           const std::vector<Surgery>& steps) {
  const int n = static_cast<int>(p.size());
  std::set<int> edited;
  TransitionMatrix<Rational> out = p;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Surgery& step = steps[k];
    try {
      if (edited.contains(step.square)) {
        throw Error(ErrorCode::OrderingViolation,
                    "square " + std::to_string(step.square) + " is modified twice");
      }
      std::vector<int> targets;
      if (step.kind == Surgery::Kind::Redirect) {
        targets.push_back(step.target);
      } else {
        check_square(step.square, n, "deck");
        for (const Card& card : step.deck.movement)
          if (card.count > 0)
            targets.push_back(resolve_destination(card.destination, step.square, n));
      }
      for (int t : targets) {
        if (t != step.square && edited.contains(t)) {
          throw Error(ErrorCode::OrderingViolation,
                      "square " + std::to_string(step.square) + " sends players to square " +
                          std::to_string(t) + ", which was already modified; edit square " +
                          std::to_string(step.square) + " first");
        }
      }
      out = step.kind == Surgery::Kind::Redirect ? apply_redirect(out, step.square, step.target)
                                                 : apply_card_deck(out, step.square, step.deck);
    } catch (const SurgeryError&) {
      throw;
    } catch (const Error& err) {
      throw SurgeryError(err.code(), k, err.what());
    }
    edited.insert(step.square);
  }
  return out;
}

std::vector<Surgery> monopoly_surgeries(const MonopolyConfig& cfg) {
  std::vector<Surgery> steps;
  if (cfg.go_to_jail_enabled) {
    steps.push_back({Surgery::Kind::Redirect, cfg.go_to_jail, cfg.jail, {}});
  }
  if (cfg.chance_enabled) {
    for (int s : cfg.chance_squares) steps.push_back({Surgery::Kind::Deck, s, 0, cfg.chance});
  }
  if (cfg.community_chest_enabled) {
    for (int s : cfg.community_chest_squares)
      steps.push_back({Surgery::Kind::Deck, s, 0, cfg.community_chest});
  }
  return steps;
}

TransitionMatrix<Rational> monopoly_board(const MonopolyConfig& cfg) {
  TransitionMatrix<Rational> loop = loop_board(cfg.squares, cfg.dice);
  if (cfg.squares == 40) loop = validate_stochastic(loop.matrix(), monopoly_square_names());
  return apply_surgeries(loop, monopoly_surgeries(cfg));
}

}  // namespace markov
