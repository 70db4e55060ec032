#pragma once

// Line-oriented board description language.
//
//   board NAME                       topology linear|loop
//   squares INT                      move D:P {D:P}       (P = a or a/b)
//   overshoot collapse|stay          absorbing K {,K}
//   redirect K -> K                  deck NAME size INT at K {,K}
//   card NAME goto K : COUNT         card NAME back K : COUNT
//   card NAME nearest K {,K} : COUNT card NAME stay : COUNT
//   label K "text"
//
// One directive per line, '#' starts a comment. Squares are 1-based.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "markov/board.hpp"

namespace markov {

enum class Topology { Linear, Loop };

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  int line = 0;
  int column = 0;
  Severity severity = Severity::Error;
  std::string message;

  /// "line:column: error: message"
  std::string to_string() const;
};

struct DeckSpec {
  std::string name;
  int size = 16;
  std::vector<int> squares;
  std::vector<Card> cards;  // movement cards, in file order
  int stay_cards = 0;       // explicit `stay` cards; unlisted cards also stay
  int line = 0;

  CardDeck deck() const;
};

struct RedirectSpec {
  int source = 0;
  int target = 0;
  int line = 0;
};

struct BoardSpec {
  std::string name;
  Topology topology = Topology::Linear;
  int squares = 0;
  MoveDistribution moves;
  std::optional<OvershootPolicy> overshoot;
  std::vector<int> absorbing;
  std::vector<RedirectSpec> redirects;
  std::vector<DeckSpec> decks;
  std::map<int, std::string> labels;
  std::map<std::string, int> directive_lines;  // directive keyword -> line

  /// Labels for every square ("" where none was given).
  std::vector<std::string> label_vector() const;
};

struct ParseResult {
  std::optional<BoardSpec> spec;  // set only when there are no errors
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return spec.has_value(); }
  std::size_t error_count() const;
};

inline constexpr int kMaxSquares = 4096;

/// Parses a whole file, collecting every diagnostic it can. Never throws on
/// malformed input.
ParseResult parse_board(std::string_view text);

/// Error raised by compile_board, carrying the offending spec line.
class CompileError : public Error {
 public:
  CompileError(ErrorCode code, int line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Builds the board's transition matrix: base topology, absorbing overrides,
/// redirects, then deck squares in file order.
TransitionMatrix<Rational> compile_board(const BoardSpec& spec);

/// Canonical pretty-printer; parse_board(render_board(s)) compiles like s.
std::string render_board(const BoardSpec& spec);

}  // namespace markov
