#pragma once

// Quantum strategies: one density matrix per Alice input, one POVM per Bob
// input. Obliviousness is checked on the states themselves: the prior-weighted
// average state of every cell must be the same operator.

#include <vector>

#include "pncgames/game.hpp"
#include "pncgames/linalg.hpp"

namespace pnc {

struct QuantumStrategy {
  int dim = 0;
  std::vector<ComplexMatrix> states;                     // [x]
  std::vector<std::vector<ComplexMatrix>> measurements;  // [y][b]

  /// Shapes plus density-matrix and POVM invariants. Throws std::invalid_argument.
  void validate() const;
};

/// p(b|x,y) = Tr(rho_x B_b^y). Probabilities in [-1e-10, 0) are clipped to 0
/// and the row renormalized; anything more negative is an error.
ConditionalDistribution born_distribution(const QuantumStrategy& qs);

/// Performance of a quantum strategy on a game, via born_distribution.
double quantum_performance(const Game& g, const QuantumStrategy& qs);

struct QuantumObliviousnessReport {
  double max_deviation = 0.0;  // max entrywise |sigma_c - sigma_c'| over cell pairs
  bool passed = true;
  // sigma_c for every cell, [partition][cell], and its entrywise distance to I/dim.
  std::vector<std::vector<ComplexMatrix>> cell_averages;
  std::vector<std::vector<double>> distance_to_mixed;
  double max_distance_to_mixed = 0.0;
};

QuantumObliviousnessReport check_quantum_obliviousness(const Game& g, const QuantumStrategy& qs,
                                                       double tol = kDefaultObliviousTol);

}  // namespace pnc
