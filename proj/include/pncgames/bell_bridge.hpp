#pragma once

// Bell functionals of the form
//   sum_{x,y} p_A(x) p_B(y) sum_{i,k} $_xy(i,k) P(a + b = F^i_xy(k) mod d)
// and the communication game they induce: Alice gets (x0, x) with x0 uniform,
// Bob must output x0 + F^i_xy(k), and obliviousness is over the grouping of
// Alice's inputs by x. A shared entangled state plus Alice's measurements
// prepares oblivious states for that game by steering.
//
// Alice's flattened input index is x0 * m_a + x.

#include <optional>
#include <string>
#include <vector>

#include "pncgames/game.hpp"
#include "pncgames/quantum_eval.hpp"
#include "pncgames/rational.hpp"

namespace pnc {

struct BellTerm {
  int x = 0;
  int y = 0;
  int i = 0;  // which target function
  int k = 0;  // argument of F^i_xy
  double payoff = 0.0;
  int f_value = 0;  // F^i_xy(k)

  friend bool operator==(const BellTerm&, const BellTerm&) = default;
};

struct BellScenario {
  int m_a = 0;
  int m_b = 0;
  int d = 0;
  std::vector<double> prior_alice;  // p_A(x), length m_a
  std::vector<double> prior_bob;    // p_B(y), length m_b
  std::optional<std::vector<Rational>> exact_prior_alice;
  std::optional<std::vector<Rational>> exact_prior_bob;
  std::vector<BellTerm> terms;
  std::optional<double> classical_bound;  // as supplied; never trusted

  /// Ranges, priors, and disjointness of F^i and F^j ranges for i != j.
  /// Throws GameError naming the offending field.
  void validate() const;

  friend bool operator==(const BellScenario&, const BellScenario&) = default;
};

struct BipartiteQuantumSetup {
  int dim_a = 0;
  int dim_b = 0;
  // Exactly one of these is set. A pure state is indexed i * dim_b + j.
  std::optional<ComplexMatrix> density;
  std::optional<ComplexVector> pure;
  std::vector<std::vector<ComplexMatrix>> alice_measurements;  // [x][a]
  std::vector<std::vector<ComplexMatrix>> bob_measurements;    // [y][b]

  /// Dimensions, state validity and POVM validity. Throws std::invalid_argument.
  void validate() const;
  /// Checks measurement counts against a scenario as well.
  void validate_for(const BellScenario& s) const;
};

/// Pure state sum_k gamma_k |k>|k> / ||gamma||.
ComplexVector schmidt_state(const std::vector<double>& gamma);

Game bridge_game(const BellScenario& s);

/// Message x0 + a(x), guess x0 + a(x) + b(y).
ConditionalDistribution group_strategy_distribution(const BellScenario& s, const std::vector<int>& a,
                                                    const std::vector<int>& b);

/// Bell functional of the local deterministic assignment (a, b), computed
/// directly from the terms.
double local_bell_value(const BellScenario& s, const std::vector<int>& a, const std::vector<int>& b);

struct GroupSweep {
  double best = 0.0;
  std::vector<int> best_a;
  std::vector<int> best_b;
  long long assignments = 0;
};

/// Every (a, b) in Z_d^{m_a} x Z_d^{m_b}; first maximizer in odometer order.
GroupSweep sweep_group_strategies(const BellScenario& s, long long budget = 50'000'000);

inline constexpr double kMarginalTol = 1e-8;

struct SteeringResult {
  std::vector<ComplexMatrix> states;  // [x0 * m_a + x]
  ComplexMatrix reduced_state;        // rho^B
  double max_marginal_deviation = 0.0;  // max |Tr(A^x_a (x) 1 rho) - 1/d|
  double max_average_deviation = 0.0;   // max_x entrywise |avg_x0 rho_{x0 x} - rho^B|
};

/// rho_{x0 x} = d Tr_A(A^x_{-x0} (x) 1 rho). Alice's outcome count must be d.
/// Throws std::invalid_argument if some marginal is off 1/d by more than tol.
SteeringResult steer_states(const BipartiteQuantumSetup& setup, double tol = kMarginalTol);

/// Steered states with Bob's measurements, ready for quantum_performance on
/// bridge_game.
QuantumStrategy steered_strategy(const BipartiteQuantumSetup& setup, double tol = kMarginalTol);

/// Bell functional with Born probabilities of the joint measurement, computed
/// on the bipartite state without steering.
double bell_value(const BellScenario& s, const BipartiteQuantumSetup& setup);

/// CHSH as success probability: d = 2, F_xy = x y, uniform priors.
BellScenario chsh_scenario();

/// CGLMP with the same term order as build_cglmp_game, so bridge_game
/// reproduces that game exactly.
BellScenario cglmp_scenario(int d);

/// Phi+ with A0 = Z, A1 = X, B0 = (Z+X)/sqrt2, B1 = (Z-X)/sqrt2 as projectors.
BipartiteQuantumSetup chsh_optimal_setup();

/// Schmidt state gamma with the CGLMP Fourier measurements for both parties.
BipartiteQuantumSetup cglmp_setup(const std::vector<double>& gamma);

}  // namespace pnc
