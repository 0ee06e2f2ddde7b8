#include <doctest.h>

#include "oracles.hpp"
#include "pncgames/bell_bridge.hpp"
#include "pncgames/catalog.hpp"
#include "pncgames/io.hpp"

using namespace pnc;

TEST_CASE("minimal game document") {
  const Game g = io::load_game(PNC_TEST_DATA_DIR "/minimal_game.json");
  CHECK(g.alice_inputs == 1);
  CHECK(g.partitions.empty());
}

TEST_CASE("catalog games round-trip and pass validation") {
  for (const Game& g : {build_rac({2, 2}), build_rac({3, 3}), build_cglmp_game(4)}) {
    const Game back = io::parse_game(io::dump_game(g));
    CHECK(back == g);
    CHECK_NOTHROW(back.validate());
    CHECK(back.exact_prior_alice.has_value() == g.exact_prior_alice.has_value());
  }
}

TEST_CASE("random games round-trip exactly") {
  oracle::Rng rng(123);
  for (int t = 0; t < 100; ++t) {
    const Game g = oracle::random_game(rng);
    CHECK(io::parse_game(io::dump_game(g)) == g);
  }
}

TEST_CASE("strategies round-trip, nested rows accepted") {
  oracle::Rng rng(9);
  QuantumStrategy qs;
  qs.dim = 3;
  for (int x = 0; x < 2; ++x) qs.states.push_back(oracle::random_density(rng, 3));
  qs.measurements = {oracle::random_povm(rng, 3, 2)};
  const auto back = io::parse_strategy(io::dump_strategy(qs));
  REQUIRE(back.states.size() == 2);
  CHECK(oracle::max_abs_diff(back.states[1], qs.states[1]) == 0.0);
  CHECK(oracle::max_abs_diff(back.measurements[0][1], qs.measurements[0][1]) == 0.0);
  const auto nested = io::parse_strategy(R"({"dim": 2, "states": [[[1, 0], [0, 0]]],
      "measurements": [[[[1, 0], [0, 0]], [[0, 0], [0, 1]]]]})");
  CHECK(nested.states[0](0, 0) == Complex(1.0, 0.0));
  CHECK(nested.measurements[0][1](1, 1) == Complex(1.0, 0.0));
}

TEST_CASE("scenarios and setups round-trip") {
  const auto s = cglmp_scenario(3);
  CHECK(io::parse_scenario(io::dump_scenario(s)) == s);
  const auto st = chsh_optimal_setup();
  const auto back = io::parse_setup(io::dump_setup(st));
  CHECK(std::abs(bell_value(chsh_scenario(), back) - bell_value(chsh_scenario(), st)) <= 1e-15);
}

TEST_CASE("errors name the problem") {
  CHECK_THROWS_WITH_AS(io::load_game(PNC_TEST_DATA_DIR "/overlapping_cells_game.json"),
                       doctest::Contains("cells not disjoint"), GameError);
  CHECK_THROWS_WITH_AS(io::load_game(PNC_TEST_DATA_DIR "/malformed.json"), doctest::Contains("malformed.json:3:"),
                       io::FormatError);
  CHECK_THROWS_WITH_AS(io::parse_game(R"({"alice_inputs": 1})"), doctest::Contains("bob_inputs"), io::FormatError);
  CHECK_THROWS_WITH_AS(io::parse_game(R"({"alice_inputs": 1.5})"), doctest::Contains("alice_inputs"),
                       io::FormatError);
  CHECK_THROWS_WITH_AS(io::parse_strategy(R"({"dim": 2, "states": [[1, 0, 0]], "measurements": []})"),
                       doctest::Contains("states[0]"), io::FormatError);
  CHECK_THROWS_AS(io::load_game("/nonexistent/game.json"), std::runtime_error);
}
