#include "markov/boardspec.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace markov {
namespace {

struct Token {
  enum class Kind { Word, Int, String, Colon, Comma, Slash, Arrow, End };
  Kind kind = Kind::End;
  std::string text;
  int column = 0;
};

// Aborts the current line; the parser records it and moves on.
struct LineError {
  int column;
  std::string message;
};

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string printable(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) {
      out += c;
    } else {
      static const char* hex = "0123456789abcdef";
      out += "\\x";
      out += hex[u >> 4];
      out += hex[u & 15];
    }
  }
  return out;
}

std::vector<Token> lex_line(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto col = [&](std::size_t pos) { return static_cast<int>(pos) + 1; };
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '#') break;
    const std::size_t start = i;
    if (is_word_start(c)) {
      while (i < line.size() && is_word_char(line[i])) ++i;
      tokens.push_back({Token::Kind::Word, std::string(line.substr(start, i - start)), col(start)});
    } else if (is_digit(c) || (c == '-' && i + 1 < line.size() && is_digit(line[i + 1]))) {
      if (c == '-') ++i;
      while (i < line.size() && is_digit(line[i])) ++i;
      if (i < line.size() && line[i] == '.') {
        throw LineError{col(start), "decimal literals are not allowed; write probabilities as a/b"};
      }
      if (i < line.size() && is_word_char(line[i])) {
        throw LineError{col(start), "malformed number"};
      }
      tokens.push_back({Token::Kind::Int, std::string(line.substr(start, i - start)), col(start)});
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      i += 2;
      tokens.push_back({Token::Kind::Arrow, "->", col(start)});
    } else if (c == ':' || c == ',' || c == '/') {
      ++i;
      const auto kind = c == ':' ? Token::Kind::Colon
                        : c == ',' ? Token::Kind::Comma
                                   : Token::Kind::Slash;
      tokens.push_back({kind, std::string(1, c), col(start)});
    } else if (c == '"') {
      ++i;
      std::string value;
      bool closed = false;
      while (i < line.size()) {
        const char d = line[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\') {
          if (i >= line.size()) break;
          const char e = line[i++];
          if (e != '"' && e != '\\') {
            throw LineError{col(i - 2), "unknown escape '\\" + printable(std::string(1, e)) + "'"};
          }
          value += e;
        } else {
          value += d;
        }
      }
      if (!closed) throw LineError{col(start), "unterminated string"};
      tokens.push_back({Token::Kind::String, std::move(value), col(start)});
    } else {
      throw LineError{col(start), "unexpected character '" + printable(line.substr(i, 1)) + "'"};
    }
  }
  tokens.push_back({Token::Kind::End, "", col(line.size())});
  return tokens;
}

struct Located {
  int value = 0;
  int line = 0;
  int column = 0;
};

struct CardEntry {
  std::string deck;
  std::optional<Card> card;  // nullopt = stay
  int count = 0;
  std::vector<Located> squares;  // square references to range-check
  int line = 0;
  int column = 0;
};

struct DeckEntry {
  DeckSpec spec;
  std::vector<Located> squares;
  int column = 0;
};

class Parser {
 public:
  ParseResult run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      line_ = line_no;
      try {
        parse_line(line);
      } catch (const LineError& e) {
        error(line_no, e.column, e.message);
      }
      if (end == text.size()) break;
      pos = end + 1;
    }
    last_line_ = std::max(line_no, 1);
    finish();
    ParseResult result;
    result.diagnostics = std::move(diags_);
    if (result.error_count() == 0) result.spec = std::move(spec_);
    return result;
  }

 private:
  void error(int line, int column, std::string message) {
    diags_.push_back({line, column, ParseDiagnostic::Severity::Error, std::move(message)});
  }
  void warning(int line, int column, std::string message) {
    diags_.push_back({line, column, ParseDiagnostic::Severity::Warning, std::move(message)});
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Token::Kind::End) ++pos_;
    return t;
  }
  bool accept(Token::Kind kind) {
    if (peek().kind != kind) return false;
    take();
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    const std::string found = t.kind == Token::Kind::End ? "end of line" : "'" + printable(t.text) + "'";
    throw LineError{t.column, "expected " + expected + ", found " + found};
  }
  void expect(Token::Kind kind, const char* what) {
    if (!accept(kind)) fail(peek(), what);
  }
  std::string expect_word(const char* what) {
    if (peek().kind != Token::Kind::Word) fail(peek(), what);
    return take().text;
  }
  std::string expect_keyword(std::initializer_list<const char*> options) {
    std::string expected;
    for (const char* o : options) expected += (expected.empty() ? "'" : " or '") + std::string(o) + "'";
    if (peek().kind == Token::Kind::Word) {
      for (const char* o : options)
        if (peek().text == o) return take().text;
    }
    fail(peek(), expected);
  }
  Located expect_int(const char* what) {
    if (peek().kind != Token::Kind::Int) fail(peek(), what);
    const Token& t = take();
    const std::string digits = t.text[0] == '-' ? t.text.substr(1) : t.text;
    if (digits.size() > 9) throw LineError{t.column, "integer " + t.text + " is out of range"};
    return {std::stoi(t.text), line_, t.column};
  }
  Rational expect_rational(int& column) {
    if (peek().kind != Token::Kind::Int) fail(peek(), "probability (a or a/b)");
    const Token& num = take();
    column = num.column;
    std::string literal = num.text;
    if (accept(Token::Kind::Slash)) {
      if (peek().kind != Token::Kind::Int) fail(peek(), "denominator");
      const Token& den = take();
      if (den.text[0] == '-') throw LineError{den.column, "denominator must be positive"};
      literal += "/" + den.text;
    }
    try {
      return parse_rational(literal);
    } catch (const Error& e) {
      throw LineError{column, e.what()};
    }
  }
  std::vector<Located> expect_int_list(const char* what) {
    std::vector<Located> out{expect_int(what)};
    while (accept(Token::Kind::Comma)) out.push_back(expect_int(what));
    return out;
  }
  std::string expect_name(const char* what) {
    if (peek().kind == Token::Kind::Word || peek().kind == Token::Kind::String) return take().text;
    fail(peek(), what);
  }

  // Records the first occurrence of a singleton directive.
  bool claim(const std::string& keyword, int column) {
    const auto [it, inserted] = spec_.directive_lines.emplace(keyword, line_);
    if (!inserted) {
      error(line_, column,
            "duplicate '" + keyword + "' directive (first on line " + std::to_string(it->second) + ")");
    }
    return inserted;
  }

  void parse_line(std::string_view line) {
    toks_ = lex_line(line);
    pos_ = 0;
    if (peek().kind == Token::Kind::End) return;
    if (peek().kind != Token::Kind::Word) fail(peek(), "directive");
    const Token head = take();
    const std::string& kw = head.text;
    if (kw == "board") {
      std::string name = expect_name("board name");
      end_of_line();
      if (claim(kw, head.column)) spec_.name = std::move(name);
    } else if (kw == "topology") {
      const std::string t = expect_keyword({"linear", "loop"});
      end_of_line();
      if (claim(kw, head.column)) spec_.topology = t == "linear" ? Topology::Linear : Topology::Loop;
    } else if (kw == "squares") {
      const Located n = expect_int("square count");
      end_of_line();
      if (!claim(kw, head.column)) return;
      if (n.value < 2 || n.value > kMaxSquares) {
        throw LineError{n.column, "square count must be between 2 and " +
                                      std::to_string(kMaxSquares) + ", got " + std::to_string(n.value)};
      }
      spec_.squares = n.value;
    } else if (kw == "move") {
      parse_move(head);
    } else if (kw == "overshoot") {
      const std::string p = expect_keyword({"collapse", "stay"});
      end_of_line();
      if (claim(kw, head.column)) {
        spec_.overshoot =
            p == "collapse" ? OvershootPolicy::CollapseToEnd : OvershootPolicy::StayInPlace;
        overshoot_column_ = head.column;
      }
    } else if (kw == "absorbing") {
      std::vector<Located> squares = expect_int_list("square number");
      end_of_line();
      if (claim(kw, head.column)) {
        for (const Located& s : squares) {
          square_refs_.push_back(s);
          if (std::find(spec_.absorbing.begin(), spec_.absorbing.end(), s.value) !=
              spec_.absorbing.end()) {
            error(s.line, s.column, "square " + std::to_string(s.value) + " listed twice");
          }
          spec_.absorbing.push_back(s.value);
        }
      }
    } else if (kw == "redirect") {
      const Located source = expect_int("source square");
      expect(Token::Kind::Arrow, "'->'");
      const Located target = expect_int("target square");
      end_of_line();
      if (source.value == target.value) {
        throw LineError{source.column, "redirect from square " + std::to_string(source.value) +
                                           " to itself"};
      }
      square_refs_.push_back(source);
      square_refs_.push_back(target);
      spec_.redirects.push_back({source.value, target.value, line_});
    } else if (kw == "deck") {
      DeckEntry d;
      d.column = head.column;
      d.spec.name = expect_name("deck name");
      expect_keyword({"size"});
      const Located size = expect_int("deck size");
      expect_keyword({"at"});
      d.squares = expect_int_list("square number");
      end_of_line();
      if (size.value < 1) throw LineError{size.column, "deck size must be positive"};
      d.spec.size = size.value;
      d.spec.line = line_;
      for (const Located& s : d.squares) d.spec.squares.push_back(s.value);
      decks_.push_back(std::move(d));
    } else if (kw == "card") {
      parse_card(head);
    } else if (kw == "label") {
      const Located square = expect_int("square number");
      if (peek().kind != Token::Kind::String) fail(peek(), "quoted label");
      std::string text = take().text;
      end_of_line();
      square_refs_.push_back(square);
      if (!spec_.labels.emplace(square.value, std::move(text)).second) {
        throw LineError{square.column, "square " + std::to_string(square.value) +
                                           " is already labelled"};
      }
    } else {
      throw LineError{head.column, "unknown directive '" + printable(kw) + "'"};
    }
  }

  void end_of_line() {
    if (peek().kind != Token::Kind::End) {
      throw LineError{peek().column, "unexpected '" + printable(peek().text) + "' after directive"};
    }
  }

  void parse_move(const Token& head) {
    std::map<int, Rational> probs;
    std::vector<std::pair<int, int>> zero_columns;
    do {
      const Located d = expect_int("displacement");
      expect(Token::Kind::Colon, "':'");
      int column = 0;
      Rational p = expect_rational(column);
      if (sgn(p) < 0) throw LineError{column, "negative probability " + to_string(p)};
      if (sgn(p) == 0) zero_columns.emplace_back(d.value, column);
      if (!probs.emplace(d.value, std::move(p)).second) {
        throw LineError{d.column, "displacement " + std::to_string(d.value) + " listed twice"};
      }
    } while (peek().kind == Token::Kind::Int);
    end_of_line();
    Rational total = 0;
    for (const auto& [d, p] : probs) total += p;
    if (total != 1) {
      throw LineError{head.column, "move probabilities sum to " + to_string(total) + ", expected 1"};
    }
    for (const auto& [d, column] : zero_columns)
      warning(line_, column, "displacement " + std::to_string(d) + " has probability 0");
    if (claim("move", head.column)) spec_.moves = MoveDistribution(std::move(probs));
  }

  void parse_card(const Token& head) {
    CardEntry c;
    c.line = line_;
    c.column = head.column;
    c.deck = expect_name("deck name");
    const std::string kind = expect_keyword({"goto", "back", "nearest", "stay"});
    if (kind == "goto") {
      const Located s = expect_int("destination square");
      c.squares.push_back(s);
      c.card = Card{FixedSquare{s.value}, 0};
    } else if (kind == "back") {
      const Located s = expect_int("number of squares");
      if (s.value < 0) throw LineError{s.column, "cannot go back a negative number of squares"};
      c.squares.push_back({s.value, s.line, s.column});
      c.card = Card{GoBack{s.value}, 0};
    } else if (kind == "nearest") {
      const std::vector<Located> list = expect_int_list("square number");
      NearestOf n;
      for (const Located& s : list) n.squares.push_back(s.value);
      c.squares = list;
      c.card = Card{std::move(n), 0};
    }
    expect(Token::Kind::Colon, "':'");
    const Located count = expect_int("card count");
    end_of_line();
    if (count.value < 0) throw LineError{count.column, "card count must be non-negative"};
    c.count = count.value;
    if (c.card) {
      c.card->count = count.value;
      if (kind == "back") c.squares.clear();  // a distance, not a square
    }
    cards_.push_back(std::move(c));
  }

  void finish() {
    static const char* required[] = {"board", "topology", "squares", "move"};
    for (const char* kw : required) {
      if (!spec_.directive_lines.contains(kw)) {
        error(last_line_, 1, std::string("missing ") + kw + " directive");
      }
    }
    if (spec_.directive_lines.contains("topology")) {
      const bool linear = spec_.topology == Topology::Linear;
      if (linear && !spec_.overshoot) {
        error(spec_.directive_lines["topology"], 1,
              "linear topology requires an overshoot directive (collapse or stay)");
      }
      if (!linear && spec_.overshoot) {
        error(spec_.directive_lines["overshoot"], overshoot_column_,
              "overshoot only applies to linear boards");
      }
    }

    // Decks and cards.
    std::map<std::string, std::size_t> deck_index;
    for (std::size_t k = 0; k < decks_.size(); ++k) {
      DeckEntry& d = decks_[k];
      if (!deck_index.emplace(d.spec.name, k).second) {
        error(d.spec.line, d.column, "duplicate deck '" + printable(d.spec.name) + "'");
      }
      for (const Located& s : d.squares) square_refs_.push_back(s);
    }
    for (CardEntry& c : cards_) {
      const auto it = deck_index.find(c.deck);
      if (it == deck_index.end()) {
        error(c.line, c.column, "card for unknown deck '" + printable(c.deck) + "'");
        continue;
      }
      DeckSpec& deck = decks_[it->second].spec;
      if (c.card) {
        deck.cards.push_back(*c.card);
      } else {
        deck.stay_cards += c.count;
      }
      for (const Located& s : c.squares) square_refs_.push_back(s);
    }
    for (const DeckEntry& d : decks_) {
      long total = d.spec.stay_cards;
      for (const Card& card : d.spec.cards) total += card.count;
      if (total > d.spec.size) {
        error(d.spec.line, d.column,
              "deck '" + printable(d.spec.name) + "' has " + std::to_string(total) +
                  " cards, exceeding size " + std::to_string(d.spec.size));
      }
    }
    for (DeckEntry& d : decks_) spec_.decks.push_back(std::move(d.spec));

    if (spec_.squares > 0) {
      for (const Located& s : square_refs_) {
        if (s.value < 1 || s.value > spec_.squares) {
          error(s.line, s.column, "square " + std::to_string(s.value) + " outside 1.." +
                                      std::to_string(spec_.squares));
        }
      }
    }
    std::sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
      return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
  }

  BoardSpec spec_;
  std::vector<ParseDiagnostic> diags_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_ = 0;
  int last_line_ = 1;
  int overshoot_column_ = 1;
  std::vector<Located> square_refs_;
  std::vector<DeckEntry> decks_;
  std::vector<CardEntry> cards_;
};

bool is_identifier(const std::string& s) {
  if (s.empty() || !is_word_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), is_word_char);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string name_token(const std::string& s) { return is_identifier(s) ? s : quote(s); }

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

int line_of(const BoardSpec& spec, const std::string& keyword) {
  const auto it = spec.directive_lines.find(keyword);
  return it == spec.directive_lines.end() ? 0 : it->second;
}

}  // namespace

std::string ParseDiagnostic::to_string() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " +
         (severity == Severity::Error ? "error" : "warning") + ": " + message;
}

std::size_t ParseResult::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(), [](const ParseDiagnostic& d) {
        return d.severity == ParseDiagnostic::Severity::Error;
      }));
}

CardDeck DeckSpec::deck() const {
  CardDeck d;
  d.size = size;
  d.movement = cards;
  return d;
}

std::vector<std::string> BoardSpec::label_vector() const {
  std::vector<std::string> out(static_cast<std::size_t>(std::max(squares, 0)));
  for (const auto& [square, text] : labels)
    if (square >= 1 && square <= squares) out[static_cast<std::size_t>(square - 1)] = text;
  return out;
}

ParseResult parse_board(std::string_view text) { return Parser().run(text); }

TransitionMatrix<Rational> compile_board(const BoardSpec& spec) {
  TransitionMatrix<Rational> p = [&] {
    try {
      if (spec.topology == Topology::Loop) return loop_board(spec.squares, spec.moves);
      const OvershootPolicy policy = spec.overshoot.value_or(OvershootPolicy::CollapseToEnd);
      if (spec.moves.has_backward_motion()) {
        return bounded_walk_board(spec.squares, spec.moves, policy);
      }
      return linear_board(spec.squares, spec.moves, policy);
    } catch (const Error& e) {
      throw CompileError(e.code(), line_of(spec, "move"), e.what());
    }
  }();
  p = validate_stochastic(p.matrix(), spec.label_vector());
  if (!spec.absorbing.empty()) {
    try {
      p = make_absorbing(p, spec.absorbing);
    } catch (const Error& e) {
      throw CompileError(e.code(), line_of(spec, "absorbing"), e.what());
    }
  }

  std::vector<Surgery> steps;
  std::vector<int> step_lines;
  for (const RedirectSpec& r : spec.redirects) {
    steps.push_back({Surgery::Kind::Redirect, r.source, r.target, {}});
    step_lines.push_back(r.line);
  }
  for (const DeckSpec& d : spec.decks) {
    const CardDeck deck = d.deck();
    for (int square : d.squares) {
      steps.push_back({Surgery::Kind::Deck, square, 0, deck});
      step_lines.push_back(d.line);
    }
  }
  try {
    return apply_surgeries(p, steps);
  } catch (const SurgeryError& e) {
    throw CompileError(e.code(), step_lines.at(e.step()), e.what());
  }
}

std::string render_board(const BoardSpec& spec) {
  std::ostringstream os;
  os << "board " << name_token(spec.name) << '\n';
  os << "topology " << (spec.topology == Topology::Linear ? "linear" : "loop") << '\n';
  os << "squares " << spec.squares << '\n';
  os << "move";
  for (const auto& [d, p] : spec.moves.entries()) os << ' ' << d << ':' << to_string(p);
  os << '\n';
  if (spec.overshoot) {
    os << "overshoot "
       << (*spec.overshoot == OvershootPolicy::CollapseToEnd ? "collapse" : "stay") << '\n';
  }
  if (!spec.absorbing.empty()) os << "absorbing " << join(spec.absorbing) << '\n';
  for (const RedirectSpec& r : spec.redirects) os << "redirect " << r.source << " -> " << r.target << '\n';
  for (const DeckSpec& d : spec.decks) {
    os << "deck " << name_token(d.name) << " size " << d.size << " at " << join(d.squares) << '\n';
    const std::string prefix = "card " + name_token(d.name) + ' ';
    for (const Card& c : d.cards) {
      os << prefix;
      std::visit(
          [&](const auto& dest) {
            using D = std::decay_t<decltype(dest)>;
            if constexpr (std::is_same_v<D, FixedSquare>) {
              os << "goto " << dest.square;
            } else if constexpr (std::is_same_v<D, GoBack>) {
              os << "back " << dest.squares;
            } else {
              os << "nearest " << join(dest.squares);
            }
          },
          c.destination);
      os << " : " << c.count << '\n';
    }
    if (d.stay_cards > 0) os << prefix << "stay : " << d.stay_cards << '\n';
  }
  for (const auto& [square, text] : spec.labels) os << "label " << square << ' ' << quote(text) << '\n';
  return os.str();
}

}  // namespace markov
