#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pncgames/catalog.hpp"
#include "pncgames/classical_bound.hpp"
#include "pncgames/seesaw.hpp"

using namespace pnc;

namespace {

const double kTsirelson = 0.5 * (1.0 + 1.0 / std::sqrt(2.0));

ComplexMatrix bloch(double x, double y, double z) {
  ComplexMatrix m(2, 2);
  m << Complex(1 + z, 0), Complex(x, -y), Complex(x, y), Complex(1 - z, 0);
  return m / 2.0;
}

std::vector<std::vector<ComplexMatrix>> zx_measurements() {
  return {{bloch(0, 0, 1), bloch(0, 0, -1)}, {bloch(1, 0, 0), bloch(-1, 0, 0)}};
}

// Two inputs, one setting, Bob must name x.
Game guess_game(int outcomes) {
  Game g;
  g.alice_inputs = 2;
  g.bob_inputs = 1;
  g.num_outcomes = outcomes;
  g.prior_alice = {0.5, 0.5};
  g.prior_bob = {1.0};
  g.tasks = {Table<int>(2, 1)};
  g.tasks[0](1, 0) = outcomes > 1 ? 1 : 0;
  g.payoffs = {Table<double>(2, 1, 1.0)};
  return g;
}

// Sum_{y,b} p_A(x) p_B(y) $ [T = b] B_b^y, built by hand.
ComplexMatrix score_operator(const Game& g, int x, const std::vector<std::vector<ComplexMatrix>>& meas) {
  ComplexMatrix s = ComplexMatrix::Zero(meas[0][0].rows(), meas[0][0].cols());
  for (int y = 0; y < g.bob_inputs; ++y)
    for (int k = 0; k < g.num_tasks(); ++k)
      s += g.prior_alice[x] * g.prior_bob[y] * g.payoffs[k](x, y) * meas[y][g.tasks[k](x, y)];
  return s;
}

}  // namespace

TEST_CASE("optimize_measurements: diagonal score operators give argmax projectors") {
  const Game g = guess_game(2);
  const std::vector<ComplexMatrix> states{bloch(0, 0, 1), bloch(0, 0, -1)};
  const auto r = optimize_measurements(g, states);
  CHECK(std::abs(r.objective - 1.0) <= 1e-8);
  CHECK(max_abs_entry(r.measurements[0][0] - bloch(0, 0, 1)) <= 1e-6);
  CHECK(max_abs_entry(r.measurements[0][1] - bloch(0, 0, -1)) <= 1e-6);
  CHECK_NOTHROW(validate_povm(r.measurements[0]));
}

TEST_CASE("optimize_measurements: one outcome leaves B0 = I") {
  const Game g = guess_game(1);
  oracle::Rng rng(4);
  const std::vector<ComplexMatrix> states{oracle::random_density(rng, 3), oracle::random_density(rng, 3)};
  const auto r = optimize_measurements(g, states);
  CHECK(max_abs_entry(r.measurements[0][0] - identity(3)) <= 1e-9);
}

TEST_CASE("optimize_measurements: BB84 states in the (2,2) RAC") {
  const Game g = build_rac({2, 2});
  const double c = 1.0 / std::sqrt(2.0);
  std::vector<ComplexMatrix> states;
  for (int x = 0; x < 4; ++x) states.push_back(bloch((x % 2) ? -c : c, 0, (x / 2) ? -c : c));
  const auto r = optimize_measurements(g, states);
  CHECK(r.objective >= 0.8535);
  CHECK(std::abs(r.objective - kTsirelson) <= 1e-8);
}

TEST_CASE("optimize_states: no partitions gives the top eigenvalue of each score operator") {
  oracle::Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Game g = oracle::random_game(rng, {4, 2, 3, false});
    const int dim = 2 + t % 2;
    std::vector<std::vector<ComplexMatrix>> meas;
    for (int y = 0; y < g.bob_inputs; ++y) meas.push_back(oracle::random_povm(rng, dim, g.num_outcomes));
    const auto r = optimize_states(g, meas);
    double want = 0;
    for (int x = 0; x < g.alice_inputs; ++x) want += hermitian_eigenvalues(score_operator(g, x, meas)).maxCoeff();
    CHECK(std::abs(r.objective - want) <= 1e-7);
    for (const auto& s : r.states) CHECK_NOTHROW(validate_density(s));
  }
}

TEST_CASE("optimize_states: sigma_z / sigma_x measurements in the (2,2) RAC") {
  const Game g = build_rac({2, 2});
  const auto r = optimize_states(g, zx_measurements());
  CHECK(std::abs(r.objective - kTsirelson) <= 1e-8);
  // Bloch vectors at 45 degrees between +-z and +-x.
  const double c = 1.0 / std::sqrt(2.0);
  for (int x = 0; x < 4; ++x) {
    const ComplexMatrix want = bloch((x % 2) ? -c : c, 0, (x / 2) ? -c : c);
    CHECK(max_abs_entry(r.states[x] - want) <= 1e-6);
  }
  QuantumStrategy qs{2, r.states, zx_measurements()};
  CHECK(check_quantum_obliviousness(g, qs, 1e-8).passed);
}

TEST_CASE("incumbents are never made worse") {
  const Game g = build_rac({2, 2});
  const double c = 1.0 / std::sqrt(2.0);
  std::vector<ComplexMatrix> states;
  for (int x = 0; x < 4; ++x) states.push_back(bloch((x % 2) ? -c : c, 0, (x / 2) ? -c : c));
  const auto meas = zx_measurements();
  const auto m = optimize_measurements(g, states, &meas);
  CHECK(m.objective >= seesaw_objective(g, states, meas));
  const auto s = optimize_states(g, meas, &states);
  CHECK(s.objective >= seesaw_objective(g, states, meas));
}

TEST_CASE("seesaw: (2,2) RAC at dimension 2") {
  SeesawConfig cfg;
  cfg.dim = 2;
  cfg.restarts = 20;
  cfg.rng_seed = 3;
  const auto r = seesaw(build_rac({2, 2}), cfg);
  CHECK(r.value >= 0.8535);
  CHECK(r.value <= kTsirelson + 1e-9);
  CHECK(r.restarts.size() == 20);
  CHECK(r.obliviousness_deviation <= 1e-7);
}

TEST_CASE("seesaw: CGLMP d=3 at dimension 3 reaches the maximally entangled value") {
  SeesawConfig cfg;
  cfg.dim = 3;
  cfg.restarts = 10;
  cfg.rng_seed = 1;
  const Game g = build_cglmp_game(3);
  const auto r = seesaw(g, cfg);
  CHECK(r.value >= 0.70);
  CHECK(r.value >= cglmp_mixed_value(3) - 1e-6);
  CHECK(check_quantum_obliviousness(g, r.strategy, 1e-7).passed);
}

TEST_CASE("seesaw is deterministic under a fixed seed") {
  SeesawConfig cfg;
  cfg.dim = 2;
  cfg.restarts = 4;
  cfg.rng_seed = 77;
  const Game g = build_rac({3, 2});
  const auto a = seesaw(g, cfg), b = seesaw(g, cfg);
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
  CHECK(seesaw_trace_csv(a.trace) == seesaw_trace_csv(b.trace));
}

TEST_CASE("seesaw from the embedded classical optimum never ends below it") {
  const Game g = build_rac({2, 3});
  BoundOptions o;
  o.max_alphabet = 3;
  const auto b = pnc_bound(g, o);
  SeesawConfig cfg;
  cfg.dim = 3;
  cfg.restarts = 1;
  cfg.initial = embed_classical(g, b.witness);
  const auto r = seesaw(g, cfg);
  CHECK(r.trace.front().objective == doctest::Approx(b.value).epsilon(1e-12));
  CHECK(r.value >= b.value - 1e-7);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].objective >= r.trace[i - 1].objective - 1e-9);
}

TEST_CASE("repairs produce valid objects") {
  oracle::Rng rng(6);
  const Game g = build_rac({2, 2});
  std::vector<ComplexMatrix> states;
  for (int x = 0; x < 4; ++x) states.push_back(oracle::random_hermitian(rng, 2));
  const auto fixed = repair_states(g, states);
  QuantumStrategy qs{2, fixed, zx_measurements()};
  CHECK_NOTHROW(qs.validate());
  CHECK(check_quantum_obliviousness(g, qs, 1e-12).passed);
  std::vector<ComplexMatrix> povm{oracle::random_hermitian(rng, 3), oracle::random_hermitian(rng, 3),
                                  oracle::random_hermitian(rng, 3)};
  CHECK_NOTHROW(validate_povm(repair_povm(povm)));
}

TEST_CASE("trace CSV") {
  const std::string csv = seesaw_trace_csv({{0, 0.5}, {1, 0.75}});
  CHECK(csv.rfind("step,objective\n", 0) == 0);
  CHECK(csv.find("1,0.75") != std::string::npos);
}
