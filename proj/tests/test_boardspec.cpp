#include <doctest.h>

#include <random>

#include "markov/analysis.hpp"
#include "markov/boardspec.hpp"
#include "test_support.hpp"

using namespace markov;
using namespace markov::testing;

namespace {

ParseResult parse(const std::string& text) { return parse_board(text); }

bool has_error(const ParseResult& r, int line, const std::string& fragment) {
  for (const auto& d : r.diagnostics)
    if (d.severity == ParseDiagnostic::Severity::Error && d.line == line &&
        d.message.find(fragment) != std::string::npos)
      return true;
  return false;
}

std::string dump(const ParseResult& r) {
  std::string s;
  for (const auto& d : r.diagnostics) s += d.to_string() + "\n";
  return s;
}

const char* kHeader =
    "board t\n"
    "topology loop\n"
    "squares 10\n"
    "move 1:1/2 2:1/2\n";

}  // namespace

TEST_SUITE("parse_board") {
  TEST_CASE("linear10 parses to the coin board") {
    const auto spec = load_board("linear10.board");
    CHECK(spec.name == "linear10");
    CHECK(spec.topology == Topology::Linear);
    CHECK(spec.squares == 10);
    CHECK(spec.moves == MoveDistribution({{1, Rational(1, 2)}, {2, Rational(1, 2)}}));
    REQUIRE(spec.overshoot.has_value());
    CHECK(*spec.overshoot == OvershootPolicy::CollapseToEnd);
    CHECK(spec.label_vector().front() == "Start");
  }

  TEST_CASE("empty input") {
    const auto r = parse("");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, 1, "missing board directive"));
  }

  TEST_CASE("probabilities that do not sum to 1") {
    const auto r = parse("board t\ntopology loop\nsquares 4\nmove 1:1/2 2:1/3\n");
    CHECK_FALSE(r.ok());
    CHECK_MESSAGE(has_error(r, 4, "move probabilities sum to 5/6, expected 1"), dump(r));
  }

  TEST_CASE("decimals, unknown directives and duplicates are errors") {
    const auto r = parse(
        "board t\n"
        "topology loop\n"
        "squares 4\n"
        "move 1:0.5 2:1/2\n"
        "colour red\n"
        "squares 5\n");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, 4, "decimal"));
    CHECK(has_error(r, 5, "unknown directive 'colour'"));
    CHECK(has_error(r, 6, "duplicate 'squares' directive (first on line 3)"));
  }

  TEST_CASE("recovery collects several diagnostics, each naming a line") {
    const auto r = parse(
        "board t\n"
        "topology loop\n"
        "squares 10\n"
        "move 1:1/2 2:1/2\n"
        "redirect 3 -> 11\n"
        "absorbing 0\n"
        "label 12 \"x\"\n"
        "card nope goto 2 : 1\n");
    CHECK(r.error_count() >= 4);
    for (const auto& d : r.diagnostics) CHECK(d.line >= 1);
    CHECK(has_error(r, 5, "outside 1..10"));
    CHECK(has_error(r, 6, "outside 1..10"));
    CHECK(has_error(r, 8, "unknown deck 'nope'"));
  }

  TEST_CASE("overshoot is required on linear boards and rejected on loops") {
    CHECK(has_error(parse("board t\ntopology linear\nsquares 4\nmove 1:1\n"), 2,
                    "requires an overshoot"));
    CHECK(has_error(parse(std::string(kHeader) + "overshoot stay\n"), 5,
                    "overshoot only applies to linear boards"));
  }

  TEST_CASE("deck overflow") {
    const auto r = parse(std::string(kHeader) +
                         "deck d size 2 at 3\n"
                         "card d goto 1 : 2\n"
                         "card d goto 5 : 1\n");
    CHECK_FALSE(r.ok());
    CHECK_MESSAGE(r.diagnostics.front().message.find("deck 'd' has 3") != std::string::npos,
                  dump(r));
  }

  TEST_CASE("comments, blank lines and CRLF") {
    const auto r = parse(
        "# heading\r\n"
        "\r\n"
        "board t   # trailing\r\n"
        "topology loop\r\n"
        "squares 4\r\n"
        "move 1:1\r\n"
        "label 2 \"Two \\\"quoted\\\"\"\r\n");
    REQUIRE_MESSAGE(r.ok(), dump(r));
    CHECK(r.spec->labels.at(2) == "Two \"quoted\"");
  }

  TEST_CASE("diagnostic text format") {
    const auto r = parse("board t\ntopology sideways\n");
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics.front().to_string().rfind("2:10: error: ", 0) == 0);
  }

  TEST_CASE("stay cards and rational literals survive exactly") {
    const auto r = parse(std::string(kHeader) +
                         "deck d size 7 at 3\n"
                         "card d goto 1 : 2\n"
                         "card d stay : 5\n");
    REQUIRE_MESSAGE(r.ok(), dump(r));
    const auto& deck = r.spec->decks.at(0);
    CHECK(deck.stay_cards == 5);
    CHECK(deck.deck().stay_count() == 5);
    const auto p = compile_board(*r.spec);
    // Square 2 reaches 3 with 1/2, of which 2/7 is sent to square 1.
    CHECK(p(1, 0) == Rational(1, 7));
    CHECK(p(1, 2) == Rational(5, 14));
  }

  TEST_CASE("fuzz: random bytes never throw") {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 200);
    for (int i = 0; i < 3000; ++i) {
      std::string s(static_cast<std::size_t>(len(rng)), '\0');
      for (char& c : s) c = static_cast<char>(byte(rng));
      CHECK_NOTHROW(parse_board(s));
    }
  }

  TEST_CASE("fuzz: mutated board files never throw and compile when accepted") {
    const std::string base = read_file(board_path("monopoly.board"));
    std::mt19937_64 rng(99);
    const std::string alphabet = "0123456789 :/,->\"#\nabcdegiklmnoprstuvy-";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 300; ++i) {
      std::string s = base;
      std::uniform_int_distribution<std::size_t> pos(0, s.size() - 1);
      for (int k = 0; k < 3; ++k) s[pos(rng)] = alphabet[pick(rng)];
      ParseResult r;
      CHECK_NOTHROW(r = parse_board(s));
      if (r.ok()) {
        try {
          (void)compile_board(*r.spec);
        } catch (const Error&) {
          // Semantic failures surface as markov::Error; anything else escapes.
        }
      }
    }
  }
}

TEST_SUITE("compile_board") {
  TEST_CASE("monopoly.board equals the programmatic builder") {
    const auto p = compile_board(load_board("monopoly.board"));
    CHECK(p.matrix() == monopoly_board().matrix());
    CHECK(p.labels() == monopoly_square_names());
  }

  TEST_CASE("linear with overshoot stay matches the builder") {
    auto spec = load_board("linear10.board");
    spec.overshoot = OvershootPolicy::StayInPlace;
    CHECK(compile_board(spec).matrix() ==
          linear_board(10, spec.moves, OvershootPolicy::StayInPlace).matrix());
  }

  TEST_CASE("ruin11 equals gamblers_ruin_board") {
    CHECK(compile_board(load_board("ruin11.board")).matrix() ==
          gamblers_ruin_board(11, Rational(18, 38)).matrix());
  }

  TEST_CASE("loop12 is doubly stochastic") {
    CHECK(is_doubly_stochastic(compile_board(load_board("loop12.board"))));
  }

  TEST_CASE("ordering violations name the offending line") {
    const auto r = parse(std::string(kHeader) +
                         "deck a size 16 at 3\n"
                         "deck b size 16 at 7\n"
                         "card b goto 3 : 1\n");
    REQUIRE(r.ok());
    try {
      compile_board(*r.spec);
      FAIL("should throw");
    } catch (const CompileError& e) {
      CHECK(e.code() == ErrorCode::OrderingViolation);
      CHECK(e.line() == 6);
    }
  }

  TEST_CASE("linear board without forward motion") {
    const auto r = parse("board t\ntopology linear\nsquares 4\nmove 0:1\novershoot stay\n");
    REQUIRE(r.ok());
    try {
      compile_board(*r.spec);
      FAIL("should throw");
    } catch (const CompileError& e) {
      CHECK(e.code() == ErrorCode::NoForwardMotion);
      CHECK(e.line() == 4);
    }
  }
}

TEST_SUITE("render_board") {
  TEST_CASE("round trip on every shipped board") {
    for (const char* name : {"linear10.board", "ruin11.board", "loop12.board", "monopoly.board"}) {
      const auto spec = load_board(name);
      const std::string text = render_board(spec);
      const auto again = parse_board(text);
      REQUIRE_MESSAGE(again.ok(), name, "\n", text, dump(again));
      CHECK(compile_board(*again.spec) == compile_board(spec));
      CHECK(render_board(*again.spec) == text);
    }
  }
}
