#pragma once

// Builders for concrete games: parity-oblivious random access codes and the
// CGLMP game, plus the closed-form quantum strategy and values for CGLMP.
//
// Index conventions
//   RAC:   x = x_1 ... x_n is flattened lexicographically, x_1 most
//          significant: index = sum_r x_r d^(n-r). Bob's y in 0..n-1 asks
//          for the symbol x_{y+1}.
//   CGLMP: Alice's pair (x0, x) has index 2*x0 + x. Tasks are ordered with k
//          outermost: task index = 2k + q.

#include <cstdint>
#include <vector>

#include "pncgames/game.hpp"
#include "pncgames/quantum_eval.hpp"
#include "pncgames/rational.hpp"

namespace pnc {

struct RacSpec {
  int n = 2;  // string length
  int d = 2;  // alphabet size
};

inline constexpr std::int64_t kDefaultRacSizeCap = 4096;

/// d^n Alice inputs, n Bob inputs, one task T = x_y with payoff 1, and one
/// partition per j in {0,1}^n of weight >= 2 (j_1 most significant), with
/// cells S_i = {x : sum_r j_r x_r = i mod d}.
Game build_rac(const RacSpec& spec, std::int64_t size_cap = kDefaultRacSizeCap);

/// (n + d - 1) / (n d).
Rational rac_pnc_bound(const RacSpec& spec);

struct CglmpSpec {
  int d = 2;
  std::vector<double> schmidt;  // gamma_k, length d; need not be normalized
};

/// The CGLMP communication game with 2 floor(d/2) tasks
/// T_k^q = x0 - (-1)^(x+y+q) (k+q) - x y mod d, payoff (-1)^q (1 - 2k/(d-1)),
/// and the partition grouping Alice's inputs by x.
Game build_cglmp_game(int d);

/// Known preparation-noncontextual bound of the CGLMP game, 1/2 for every d
/// (attained at alphabet d by the group strategies).
Rational cglmp_pnc_bound(int d);

/// Remotely prepared states of a Schmidt-form state measured in Alice's
/// Fourier bases, with Bob's CGLMP measurements.
QuantumStrategy cglmp_quantum_strategy(const CglmpSpec& spec);

/// Closed-form performance of cglmp_quantum_strategy for any Schmidt vector.
double cglmp_value_formula(const CglmpSpec& spec);

/// Closed-form performance for the maximally entangled state (gamma_k = 1).
double cglmp_mixed_value(int d);

/// Alice's and Bob's measurement bases in the CGLMP construction, exposed so
/// the Bell-bridge can rebuild the same experiment from a shared state.
/// alice[x][a] and bob[y][b] are rank-one projectors.
std::vector<std::vector<ComplexMatrix>> cglmp_alice_measurements(int d);
std::vector<std::vector<ComplexMatrix>> cglmp_bob_measurements(int d);

}  // namespace pnc
