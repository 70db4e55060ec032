#include <doctest.h>

#include <random>

#include "markov/analysis.hpp"
#include "markov/board.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace markov;
using namespace markov::testing;

namespace {

const MoveDistribution kCoin({{1, Rational(1, 2)}, {2, Rational(1, 2)}});

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected markov::Error");
  return ErrorCode::InvalidArgument;
}

Rational column_sum(const TransitionMatrix<Rational>& p, std::size_t j) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p(i, j);
  return s;
}

// Coin board transition matrix, written out by hand.
Matrix<Rational> coin_matrix() {
  const Rational h(1, 2);
  Matrix<Rational> m(10, 10);
  for (std::size_t k = 0; k < 8; ++k) {
    m(k, k + 1) = h;
    m(k, k + 2) = h;
  }
  m(8, 9) = 1;
  m(9, 9) = 1;
  return m;
}

}  // namespace

TEST_SUITE("MoveDistribution") {
  TEST_CASE("dice sums") {
    const auto d = MoveDistribution::dice();
    CHECK(d.entries().size() == 11);
    CHECK(d.probability(2) == Rational(1, 36));
    CHECK(d.probability(7) == Rational(1, 6));
    CHECK(d.probability(12) == Rational(1, 36));
    CHECK(d.probability(13) == 0);
    CHECK(MoveDistribution::dice(1, 4).probability(3) == Rational(1, 4));
  }

  TEST_CASE("probabilities must sum to 1 and be non-negative") {
    try {
      MoveDistribution({{1, Rational(1, 2)}, {2, Rational(1, 3)}});
      FAIL("should throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidMoveDistribution);
      CHECK(std::string(e.what()) == "move probabilities sum to 5/6, expected 1");
    }
    CHECK(code_of([] { MoveDistribution({{1, Rational(3, 2)}, {2, Rational(-1, 2)}}); }) ==
          ErrorCode::InvalidMoveDistribution);
  }

  TEST_CASE("direction queries") {
    CHECK(kCoin.has_forward_motion());
    CHECK_FALSE(kCoin.has_backward_motion());
    const MoveDistribution ruin({{1, Rational(1, 3)}, {-1, Rational(2, 3)}});
    CHECK(ruin.has_backward_motion());
    CHECK_FALSE(MoveDistribution({{0, Rational(1)}}).has_forward_motion());
  }
}

TEST_SUITE("linear_board") {
  TEST_CASE("coin board equals the hand-written matrix") {
    CHECK(linear_board(10, kCoin, OvershootPolicy::CollapseToEnd).matrix() == coin_matrix());
  }

  TEST_CASE("stay-in-place equals the hand-written matrix with row 9 copied from row 8") {
    const auto stay = linear_board(10, kCoin, OvershootPolicy::StayInPlace);
    auto expected = coin_matrix();
    expected(8, 9) = Rational(1, 2);
    expected(8, 8) = Rational(1, 2);
    CHECK(stay.matrix() == expected);
    for (std::size_t j = 0; j < 10; ++j) CHECK(stay(8, j) == stay(7, j));
  }

  TEST_CASE("two squares") {
    const MoveDistribution one({{1, Rational(1)}});
    for (auto policy : {OvershootPolicy::CollapseToEnd, OvershootPolicy::StayInPlace}) {
      const auto p = linear_board(2, one, policy);
      CHECK(p.matrix() == Matrix<Rational>::from_rows({{0, 1}, {0, 1}}));
    }
  }

  TEST_CASE("errors") {
    CHECK(code_of([] {
            linear_board(10, MoveDistribution({{-1, Rational(1, 2)}, {1, Rational(1, 2)}}),
                         OvershootPolicy::CollapseToEnd);
          }) == ErrorCode::NegativeDisplacement);
    CHECK(code_of([] {
            linear_board(10, MoveDistribution({{0, Rational(1)}}), OvershootPolicy::StayInPlace);
          }) == ErrorCode::NoForwardMotion);
    CHECK(code_of([] { linear_board(1, kCoin, OvershootPolicy::StayInPlace); }) ==
          ErrorCode::TooFewSquares);
  }

  TEST_CASE("policies differ only in rows that can overshoot") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      const auto moves = random_moves(rng, 0, 6);
      if (!moves.has_forward_motion()) continue;
      const int n = 2 + trial % 15;
      const auto a = linear_board(n, moves, OvershootPolicy::CollapseToEnd);
      const auto b = linear_board(n, moves, OvershootPolicy::StayInPlace);
      const int max_move = moves.entries().rbegin()->first;
      for (int k = 1; k <= n; ++k) {
        const bool can_overshoot = k < n && k + max_move > n;
        bool same = true;
        for (std::size_t j = 0; j < a.size(); ++j)
          same = same && a(static_cast<std::size_t>(k - 1), j) == b(static_cast<std::size_t>(k - 1), j);
        CHECK(same == !can_overshoot);
      }
    }
  }

  TEST_CASE("E(1, j) approaches 2/3 on the coin board") {
    const auto a = analyze(linear_board(10, kCoin, OvershootPolicy::CollapseToEnd));
    for (std::size_t j = 6; j < 9; ++j)
      CHECK(abs(a.fundamental->e(0, j) - Rational(2, 3)) <= Rational(6, 1000));
  }
}

TEST_SUITE("bounded_walk_board") {
  TEST_CASE("clamps at square 1 and absorbs at the last square") {
    const MoveDistribution walk({{-2, Rational(1, 4)}, {1, Rational(3, 4)}});
    const auto p = bounded_walk_board(5, walk, OvershootPolicy::CollapseToEnd);
    CHECK(p(0, 0) == Rational(1, 4));
    CHECK(p(0, 1) == Rational(3, 4));
    CHECK(p(3, 1) == Rational(1, 4));
    CHECK(p(3, 4) == Rational(3, 4));
    CHECK(p(4, 4) == 1);
    const auto s = bounded_walk_board(5, walk, OvershootPolicy::StayInPlace);
    CHECK(s(1, 1) == Rational(1, 4));
  }
}

TEST_SUITE("gamblers_ruin_board") {
  TEST_CASE("structure and degenerate odds") {
    const auto p = gamblers_ruin_board(11, Rational(18, 38));
    CHECK(p(0, 0) == 1);
    CHECK(p(10, 10) == 1);
    CHECK(p(5, 6) == Rational(9, 19));
    CHECK(p(5, 4) == Rational(10, 19));
    const auto lose = analyze(gamblers_ruin_board(11, Rational(0)));
    for (std::size_t i = 0; i < 9; ++i) CHECK(lose.absorption->by_class(i, 0) == 1);
    CHECK(code_of([] { gamblers_ruin_board(2, Rational(1, 2)); }) == ErrorCode::TooFewSquares);
    CHECK(code_of([] { gamblers_ruin_board(5, Rational(3, 2)); }) == ErrorCode::InvalidArgument);
  }
}

TEST_SUITE("loop_board") {
  TEST_CASE("dice loop of 40 is doubly stochastic with uniform pi") {
    const auto p = loop_board(40, MoveDistribution::dice());
    CHECK(is_doubly_stochastic(p));
    const auto a = analyze(p);
    REQUIRE(a.stationary.size() == 1);
    for (const auto& v : a.stationary[0].pi) CHECK(v == Rational(1, 40));
  }

  TEST_CASE("circulant rows with wraparound") {
    const auto p = loop_board(12, MoveDistribution({{1, Rational(1, 10)}, {2, Rational(2, 10)},
                                                    {3, Rational(4, 10)}, {4, Rational(3, 10)}}));
    for (std::size_t k = 0; k < 12; ++k)
      for (std::size_t j = 0; j < 12; ++j) CHECK(p(k, j) == p((k + 1) % 12, (j + 1) % 12));
    CHECK(p(11, 0) == Rational(1, 10));
    CHECK(p(10, 2) == Rational(3, 10));
    CHECK(is_doubly_stochastic(p));
  }

  TEST_CASE("two-square swap has period 2") {
    const auto p = loop_board(2, MoveDistribution({{1, Rational(1)}}));
    CHECK(p.matrix() == Matrix<Rational>::from_rows({{0, 1}, {1, 0}}));
    CHECK(classify_states(p).recurrent_classes.at(0).period == 2);
  }
}

TEST_SUITE("apply_redirect") {
  TEST_CASE("column sums move from source to target") {
    const auto p = loop_board(40, MoveDistribution::dice());
    const auto q = apply_redirect(p, 31, 11);
    CHECK(column_sum(q, 30) == 0);
    CHECK(column_sum(q, 10) == column_sum(p, 10) + column_sum(p, 30));
    for (std::size_t j = 0; j < 40; ++j)
      if (j != 10 && j != 30)
        for (std::size_t i = 0; i < 40; ++i) CHECK(q(i, j) == p(i, j));
    CHECK(apply_redirect(q, 31, 11) == q);
    CHECK(code_of([&] { apply_redirect(p, 5, 5); }) == ErrorCode::SelfRedirect);
    CHECK(code_of([&] { apply_redirect(p, 0, 5); }) == ErrorCode::InvalidSquare);
    CHECK(code_of([&] { apply_redirect(p, 5, 41); }) == ErrorCode::InvalidSquare);
  }

  TEST_CASE("jail-only loop: jail 0.05, Go To Jail 0, square 18 highest elsewhere") {
    const auto a = analyze(apply_redirect(loop_board(40, MoveDistribution::dice()), 31, 11));
    REQUIRE(a.stationary.size() == 1);
    const auto& pi = a.stationary[0].pi;
    CHECK(pi[30] == 0);
    CHECK(std::fabs(to_double(pi[10]) - 0.05) <= 1e-6);
    std::size_t best = 0;
    for (std::size_t i = 0; i < 40; ++i)
      if (i != 10 && pi[i] > pi[best]) best = i;
    CHECK(best + 1 == 18);
  }
}

TEST_SUITE("apply_card_deck") {
  TEST_CASE("Community Chest on square 3 is three column operations") {
    const auto p = apply_redirect(loop_board(40, MoveDistribution::dice()), 31, 11);
    const auto q = apply_card_deck(p, 3, default_community_chest_deck());
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK(q(i, 0) == p(i, 0) + p(i, 2) / 16);
      CHECK(q(i, 10) == p(i, 10) + p(i, 2) / 16);
      CHECK(q(i, 2) == p(i, 2) * 14 / 16);
      for (std::size_t j = 0; j < 40; ++j)
        if (j != 0 && j != 2 && j != 10) CHECK(q(i, j) == p(i, j));
    }
  }

  TEST_CASE("a deck without movement cards changes nothing") {
    const auto p = loop_board(40, MoveDistribution::dice());
    CHECK(apply_card_deck(p, 8, CardDeck{16, {}}) == p);
  }

  TEST_CASE("random decks keep rows stochastic") {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<int> square(1, 30);
    std::uniform_int_distribution<int> count(0, 3);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 30;
      auto p = loop_board(n, random_moves(rng, 1, 6));
      const int at = square(rng);
      CardDeck deck{16, {}};
      deck.movement.push_back({FixedSquare{square(rng) == at ? 1 : square(rng)}, count(rng)});
      deck.movement.push_back({GoBack{1 + count(rng)}, count(rng)});
      deck.movement.push_back({NearestOf{{square(rng), square(rng)}}, count(rng)});
      const auto q = apply_card_deck(p, at, deck);
      CHECK_NOTHROW(validate_stochastic(q.matrix()));
      for (std::size_t i = 0; i < q.size(); ++i) {
        Rational sum = 0;
        for (std::size_t j = 0; j < q.size(); ++j) sum += q(i, j);
        CHECK(sum == 1);
      }
    }
  }

  TEST_CASE("deck validation") {
    CHECK(code_of([] { CardDeck{0, {}}.validate(); }) == ErrorCode::InvalidDeck);
    CHECK(code_of([] { CardDeck{2, {{FixedSquare{1}, 2}, {FixedSquare{2}, 1}}}.validate(); }) ==
          ErrorCode::InvalidDeck);
    CHECK(code_of([] { CardDeck{4, {{FixedSquare{1}, -1}}}.validate(); }) ==
          ErrorCode::InvalidDeck);
    const auto p = loop_board(10, MoveDistribution::dice(1, 6));
    CHECK(code_of([&] { apply_card_deck(p, 3, CardDeck{16, {{NearestOf{{}}, 1}}}); }) ==
          ErrorCode::DestinationResolution);
  }
}

TEST_SUITE("resolve_destination") {
  TEST_CASE("nearest is clockwise with wrap, go back wraps past Go") {
    const NearestOf rail{{6, 16, 26, 36}};
    const NearestOf util{{13, 29}};
    CHECK(resolve_destination(rail, 8, 40) == 16);
    CHECK(resolve_destination(rail, 23, 40) == 26);
    CHECK(resolve_destination(rail, 37, 40) == 6);
    CHECK(resolve_destination(util, 8, 40) == 13);
    CHECK(resolve_destination(util, 23, 40) == 29);
    CHECK(resolve_destination(util, 37, 40) == 13);
    CHECK(resolve_destination(GoBack{3}, 37, 40) == 34);
    CHECK(resolve_destination(GoBack{3}, 2, 40) == 39);
    CHECK(resolve_destination(FixedSquare{25}, 8, 40) == 25);
  }

  TEST_CASE("default decks") {
    const auto chance = default_chance_deck();
    CHECK(chance.size == 16);
    CHECK(chance.movement.size() == 9);
    CHECK(chance.movement_count() == 10);
    CHECK(chance.stay_count() == 6);
    CHECK(single_railroad_chance_deck().movement_count() == 9);
    const auto cc = default_community_chest_deck();
    CHECK(cc.movement_count() == 2);
    CHECK(monopoly_square_names().size() == 40);
    CHECK(monopoly_square_names()[24] == "Illinois Ave.");
  }
}

TEST_SUITE("monopoly_board") {
  TEST_CASE("everything disabled equals the plain dice loop") {
    MonopolyConfig cfg;
    cfg.go_to_jail_enabled = cfg.chance_enabled = cfg.community_chest_enabled = false;
    CHECK(monopoly_board(cfg).matrix() == loop_board(40, MoveDistribution::dice()).matrix());
  }

  TEST_CASE("decks disabled reproduces the jail-only stationary vector") {
    MonopolyConfig cfg;
    cfg.chance_enabled = cfg.community_chest_enabled = false;
    const auto a = analyze(monopoly_board(cfg));
    for (std::size_t i = 0; i < 40; ++i)
      CHECK(matches_printed(to_double(a.stationary.at(0).pi[i]), kJailOnlyPi[i], 3));
  }

  TEST_CASE("full model: qualitative shape of the reference vector") {
    const auto p = monopoly_board();
    CHECK_NOTHROW(validate_stochastic(p.matrix()));
    const auto a = analyze(p);
    REQUIRE(a.stationary.size() == 1);
    const auto& pi = a.stationary[0].pi;
    CHECK(pi[30] == 0);
    CHECK(to_double(pi[10]) >= 0.057);
    CHECK(to_double(pi[10]) <= 0.061);
    for (int sq : {8, 23, 37}) CHECK(to_double(pi[static_cast<std::size_t>(sq - 1)]) < 0.012);
    std::size_t best = 0;
    for (std::size_t i = 0; i < 40; ++i)
      if (i != 10 && pi[i] > pi[best]) best = i;
    CHECK(best + 1 == 25);
    CHECK(p.label(24) == "Illinois Ave.");
    for (std::size_t i = 0; i < 40; ++i)
      CHECK_MESSAGE(std::fabs(to_double(pi[i]) - kFullMonopolyPi[i]) <= 5e-6 + 1e-12, "square ",
                    i + 1);
  }

  TEST_CASE("single Nearest Railroad card leaves Chance squares too heavy") {
    MonopolyConfig cfg;
    cfg.chance = single_railroad_chance_deck();
    const auto a = analyze(to_double(monopoly_board(cfg)));
    const auto& pi = a.stationary.at(0).pi;
    CHECK(pi[22] > 0.012);
    CHECK(std::fabs(pi[25] - kFullMonopolyPi[25]) > 1e-3);
  }

  TEST_CASE("surgery order: chance squares before community chest squares") {
    const auto steps = monopoly_surgeries(MonopolyConfig{});
    REQUIRE(steps.size() == 7);
    CHECK(steps[0].kind == Surgery::Kind::Redirect);
    std::vector<int> order;
    for (std::size_t k = 1; k < steps.size(); ++k) order.push_back(steps[k].square);
    CHECK(order == std::vector<int>{8, 23, 37, 3, 18, 34});
  }

  TEST_CASE("card sending mass to an already-edited square is an ordering violation") {
    MonopolyConfig cfg;
    // A Community Chest card to Chance square 8 would bypass the Chance edit.
    cfg.community_chest.movement.push_back({FixedSquare{8}, 1});
    try {
      monopoly_board(cfg);
      FAIL("should throw");
    } catch (const SurgeryError& e) {
      CHECK(e.code() == ErrorCode::OrderingViolation);
      CHECK(e.step() == 4);
    }
    // Reverse order: Community Chest on 34 before Chance on 37 breaks Go Back 3.
    const auto p = loop_board(40, MoveDistribution::dice());
    const std::vector<Surgery> reversed = {
        {Surgery::Kind::Deck, 34, 0, default_community_chest_deck()},
        {Surgery::Kind::Deck, 37, 0, default_chance_deck()},
    };
    CHECK(code_of([&] { apply_surgeries(p, reversed); }) == ErrorCode::OrderingViolation);
    const std::vector<Surgery> twice = {{Surgery::Kind::Redirect, 31, 11, {}},
                                        {Surgery::Kind::Redirect, 31, 11, {}}};
    CHECK(code_of([&] { apply_surgeries(p, twice); }) == ErrorCode::OrderingViolation);
  }
}

TEST_SUITE("builders") {
  TEST_CASE("every builder output validates exactly") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + trial;
      const auto moves = random_moves(rng, 0, 5);
      std::vector<TransitionMatrix<Rational>> outs;
      if (moves.has_forward_motion()) {
        outs.push_back(linear_board(n, moves, OvershootPolicy::CollapseToEnd));
        outs.push_back(linear_board(n, moves, OvershootPolicy::StayInPlace));
      }
      const auto walk = random_moves(rng, -3, 3);
      if (walk.has_forward_motion())
        outs.push_back(bounded_walk_board(n, walk, OvershootPolicy::CollapseToEnd));
      outs.push_back(loop_board(n, random_moves(rng, -2, 7)));
      outs.push_back(gamblers_ruin_board(n, random_probabilities(rng, 2)[0]));
      outs.push_back(make_absorbing(outs.back(), {2}));
      outs.push_back(apply_redirect(outs.back(), 2, n));
      for (const auto& p : outs) CHECK_NOTHROW(validate_stochastic(p.matrix()));
    }
  }
}
