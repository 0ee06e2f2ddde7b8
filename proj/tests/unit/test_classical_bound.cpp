#include <doctest.h>

#include "oracles.hpp"
#include "pncgames/bell_bridge.hpp"
#include "pncgames/catalog.hpp"
#include "pncgames/classical_bound.hpp"

using namespace pnc;

namespace {

// (2,2) RAC strategy: message f(x1, x2), Bob outputs the message.
ClassicalStrategy rac22(int (*f)(int, int)) {
  ClassicalStrategy s;
  s.alphabet_size = 2;
  for (int x = 0; x < 4; ++x) s.encoding.push_back(f(x / 2, x % 2));
  s.decoding = Table<int>(2, 2);
  for (int m = 0; m < 2; ++m) s.decoding(m, 0) = s.decoding(m, 1) = m;
  return s;
}

BoundResult bound(const Game& g, int alphabet, SearchMode mode) {
  BoundOptions o;
  o.max_alphabet = alphabet;
  o.mode = mode;
  return pnc_bound(g, o);
}

}  // namespace

TEST_CASE("is_balanced examples") {
  const Game g = build_rac({2, 2});
  ClassicalStrategy constant;
  constant.alphabet_size = 1;
  constant.encoding.assign(4, 0);
  constant.decoding = Table<int>(1, 2, 0);
  CHECK(is_balanced(g, constant));
  CHECK(is_balanced(g, rac22([](int a, int) { return a; })));
  CHECK_FALSE(is_balanced(g, rac22([](int a, int b) { return a ^ b; })));
}

TEST_CASE("strategy_distribution examples") {
  const Game g = build_rac({2, 2});
  ClassicalStrategy constant;
  constant.alphabet_size = 1;
  constant.encoding.assign(4, 0);
  constant.decoding = Table<int>(1, 2, 1);
  const auto d0 = strategy_distribution(g, constant);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y) CHECK(d0(x, y, 1) == 1.0);

  const auto s = rac22([](int a, int) { return a; });
  const auto d = strategy_distribution(g, s);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y) CHECK(d(x, y, x / 2) == 1.0);
  CHECK(performance(g, d) == oracle::rac_bound(2, 2).to_double());
  const auto exact = exact_performance(g, s);
  REQUIRE(exact);
  CHECK(*exact == oracle::rac_bound(2, 2));
}

TEST_CASE("pnc_bound on parity-oblivious RACs equals (n+d-1)/(nd) in both modes") {
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    CAPTURE(n);
    CAPTURE(d);
    const Game g = build_rac({n, d});
    const Rational want = oracle::rac_bound(n, d);
    for (auto mode : {SearchMode::exact, SearchMode::branch_and_bound}) {
      const auto b = bound(g, d, mode);
      REQUIRE(b.exact_value);
      CHECK(*b.exact_value == want);
      CHECK(b.value == doctest::Approx(want.to_double()).epsilon(1e-15));
      CHECK(is_balanced(g, b.witness));
      CHECK(oracle::balanced(g, b.witness.encoding, b.witness.alphabet_size));
      CHECK(oracle::exact_performance(g, b.witness) == want);
    }
  }
}

TEST_CASE("pnc_bound of the CGLMP game at d=3, alphabet 3") {
  const Game g = build_cglmp_game(3);
  const auto b = bound(g, 3, SearchMode::branch_and_bound);
  CHECK(b.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(oracle::exact_performance(g, b.witness) == Rational(1, 2));
  CHECK(oracle::brute_force_bound(g, 3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("exact mode refuses a search above its leaf budget") {
  BoundOptions o;
  o.mode = SearchMode::exact;
  o.max_alphabet = 3;
  o.exact_leaf_budget = 1000;
  CHECK_THROWS_WITH_AS(pnc_bound(build_rac({3, 3}), o), doctest::Contains("branch"), std::runtime_error);
}

TEST_CASE("pnc_bound agrees with brute force, across modes, monotone in the alphabet") {
  oracle::Rng rng(2024);
  for (int t = 0; t < 150; ++t) {
    CAPTURE(t);
    const Game g = oracle::random_game(rng, {7, 3, 3, true});
    double prev = -INFINITY;
    for (int L = 1; L <= 3; ++L) {
      const auto e = bound(g, L, SearchMode::exact);
      const auto b = bound(g, L, SearchMode::branch_and_bound);
      CHECK(std::abs(e.value - b.value) <= 1e-12);
      CHECK(std::abs(e.value - oracle::brute_force_bound(g, L)) <= 1e-12);
      CHECK(e.value >= prev - 1e-12);
      prev = e.value;
      for (const auto* r : {&e, &b}) {
        CHECK(oracle::balanced(g, r->witness.encoding, r->witness.alphabet_size));
        CHECK(std::abs(performance(g, strategy_distribution(g, r->witness)) - r->value) <= 1e-12);
      }
    }
  }
}

TEST_CASE("greedy decoding is never beaten by exhaustive decoding") {
  oracle::Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const Game g = oracle::random_game(rng, {5, 2, 3, false});
    const auto s = oracle::random_classical(rng, g, 4);
    ClassicalStrategy greedy = s;
    greedy.decoding = greedy_decoding(g, s.encoding, s.alphabet_size);
    const double gv = performance(g, strategy_distribution(g, greedy));
    CHECK(gv >= oracle::best_decoding_exhaustive(g, s.encoding, s.alphabet_size) - 1e-12);
  }
}

TEST_CASE("alphabet cap on bridge games") {
  SUBCASE("CHSH bridge, 4 inputs") {
    const auto r = max_oblivious_alphabet_check(bridge_game(chsh_scenario()));
    CHECK(r.d == 2);
    CHECK(r.alphabet == 3);
    CHECK(r.confirmed);
    CHECK(r.balanced_found == 0);
    CHECK(r.method == "exhaustive");
    CHECK(r.encodings_examined == 81);
    REQUIRE(r.witness_at_d);
  }
  SUBCASE("CGLMP d=3 bridge, 6 inputs") {
    const Game g = bridge_game(cglmp_scenario(3));
    const auto r = max_oblivious_alphabet_check(g);
    CHECK(r.confirmed);
    CHECK(r.encodings_examined == 4096);
    REQUIRE(r.witness_at_d);
    CHECK(oracle::balanced(g, *r.witness_at_d, 3));
    // E = x0 is balanced at alphabet d.
    std::vector<int> e(6);
    for (int i = 0; i < 6; ++i) e[i] = i / 2;
    CHECK(oracle::balanced(g, e, 3));
  }
}

TEST_CASE("find_balanced_encoding") {
  const Game g = build_rac({2, 2});
  const auto two = find_balanced_encoding(g, 2, true);
  REQUIRE(two);
  CHECK(oracle::balanced(g, *two, 2));
  // Four singleton classes cannot be balanced across parity cells.
  CHECK_FALSE(find_balanced_encoding(g, 4, true));
}

TEST_CASE("saturated flag and default alphabet") {
  const Game g = build_rac({2, 2});
  CHECK(default_max_alphabet(g) == 2);
  const auto b = pnc_bound(g);
  CHECK(b.max_alphabet == 2);
  CHECK(b.saturated);
}
