#pragma once

// Transition-matrix builders for board games. Squares are 1-based here
// (Go = 1, numbered clockwise); the returned matrices are 0-based as usual.
// All builders work in exact arithmetic; convert with to_double() when the
// float backend is wanted.

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "markov/chain.hpp"

namespace markov {

/// Displacement -> probability. Probabilities are non-negative and sum to 1.
class MoveDistribution {
 public:
  MoveDistribution() = default;
  explicit MoveDistribution(std::map<int, Rational> probabilities);

  /// Sum of `dice` fair dice with `sides` faces each.
  static MoveDistribution dice(int count = 2, int sides = 6);

  const std::map<int, Rational>& entries() const noexcept { return probs_; }
  Rational probability(int displacement) const;
  bool has_forward_motion() const;
  bool has_backward_motion() const;

  friend bool operator==(const MoveDistribution&, const MoveDistribution&) = default;

 private:
  std::map<int, Rational> probs_;
};

enum class OvershootPolicy {
  CollapseToEnd,  // overshooting moves land on the last square
  StayInPlace,    // overshooting moves forfeit the turn (must land exactly)
};

struct FixedSquare {
  int square;
  friend bool operator==(const FixedSquare&, const FixedSquare&) = default;
};
struct GoBack {
  int squares;
  friend bool operator==(const GoBack&, const GoBack&) = default;
};
struct NearestOf {
  std::vector<int> squares;
  friend bool operator==(const NearestOf&, const NearestOf&) = default;
};
using Destination = std::variant<FixedSquare, GoBack, NearestOf>;

struct Card {
  Destination destination;
  int count = 1;
  friend bool operator==(const Card&, const Card&) = default;
};

/// Deck drawn with replacement. Cards not listed in `movement` leave the
/// player where they are.
struct CardDeck {
  int size = 16;
  std::vector<Card> movement;

  int movement_count() const;
  int stay_count() const { return size - movement_count(); }
  /// Throws InvalidDeck when size < 1, a count is negative or the counts overflow.
  void validate() const;

  friend bool operator==(const CardDeck&, const CardDeck&) = default;
};

/// Square reached by drawing a card with this destination while on `square`.
/// NearestOf picks the first listed square met moving clockwise (wrapping past
/// Go); GoBack wraps backwards past Go.
int resolve_destination(const Destination& d, int square, int squares);

/// Standard Chance deck: nine kinds of movement card, Nearest Railroad twice,
/// so 10 of the 16 cards relocate the player.
CardDeck default_chance_deck();
/// The same deck with a single Nearest Railroad card (9 of 16 relocate).
CardDeck single_railroad_chance_deck();
CardDeck default_community_chest_deck();

/// Names of the 40 standard Monopoly squares, Go first.
std::vector<std::string> monopoly_square_names();

struct MonopolyConfig {
  int squares = 40;
  MoveDistribution dice = MoveDistribution::dice();
  bool go_to_jail_enabled = true;
  int go_to_jail = 31;
  int jail = 11;
  bool chance_enabled = true;
  bool community_chest_enabled = true;
  std::vector<int> chance_squares{8, 23, 37};
  std::vector<int> community_chest_squares{3, 18, 34};
  CardDeck chance = default_chance_deck();
  CardDeck community_chest = default_community_chest_deck();
};

/// Square k moves to k + d with probability moves(d); mass past the last
/// square follows `policy`; the last square is absorbing. Displacements must
/// be non-negative and some positive displacement must have positive mass.
TransitionMatrix<Rational> linear_board(int squares, const MoveDistribution& moves,
                                        OvershootPolicy policy);

/// Like linear_board but also accepts backward moves; mass before square 1
/// collapses onto square 1 (or stays put under StayInPlace).
TransitionMatrix<Rational> bounded_walk_board(int squares, const MoveDistribution& moves,
                                              OvershootPolicy policy);

/// Squares 1 and n absorb; interior squares step +1 with p_win, -1 otherwise.
TransitionMatrix<Rational> gamblers_ruin_board(int squares, const Rational& p_win);

/// Circulant loop: every square uses the same move distribution, mod n.
TransitionMatrix<Rational> loop_board(int squares, const MoveDistribution& moves);

/// Replaces the rows of the given squares with identity rows.
TransitionMatrix<Rational> make_absorbing(const TransitionMatrix<Rational>& p,
                                          const std::vector<int>& squares);

/// Landing on `source` sends the player to `target`:
/// column(target) += column(source); column(source) = 0.
TransitionMatrix<Rational> apply_redirect(const TransitionMatrix<Rational>& p, int source,
                                          int target);

/// Moves the mass landing on `square` to each card's destination with
/// probability count/size; the rest stays on `square`.
TransitionMatrix<Rational> apply_card_deck(const TransitionMatrix<Rational>& p, int square,
                                           const CardDeck& deck);

/// One column edit in a sequence of board modifications.
struct Surgery {
  enum class Kind { Redirect, Deck };
  Kind kind = Kind::Redirect;
  int square = 0;  // redirect source or deck square
  int target = 0;  // redirect target
  CardDeck deck;
};

/// Raised by apply_surgeries; identifies the step that failed.
class SurgeryError : public Error {
 public:
  SurgeryError(ErrorCode code, std::size_t step, const std::string& message)
      : Error(code, message), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Applies surgeries in order. Mass moved onto a square whose column was
/// already edited would escape that edit, so such sequences (and repeated
/// edits of the same square) raise OrderingViolation.
TransitionMatrix<Rational> apply_surgeries(const TransitionMatrix<Rational>& p,
                                           const std::vector<Surgery>& steps);

/// The surgery sequence monopoly_board applies: redirect, every Chance
/// square, then every Community Chest square.
std::vector<Surgery> monopoly_surgeries(const MonopolyConfig& cfg);

TransitionMatrix<Rational> monopoly_board(const MonopolyConfig& cfg = {});

}  // namespace markov
