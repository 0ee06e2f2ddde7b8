#pragma once

// Lower bounds on the best oblivious quantum performance by alternating
// optimization: with the states fixed, each POVM is an independent SDP; with
// the POVMs fixed, the states form one SDP with the obliviousness equalities
// as linear constraints. Both half-steps are solved by the interior-point
// solver in sdp.hpp, then repaired onto the exact feasible set so that every
// accepted iterate is a valid oblivious strategy.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pncgames/classical_bound.hpp"
#include "pncgames/game.hpp"
#include "pncgames/quantum_eval.hpp"
#include "pncgames/sdp.hpp"

namespace pnc {

struct SeesawConfig {
  int dim = 2;
  int restarts = 50;
  int max_iters = 2000;
  double eps = 1e-9;  // stop when one full iteration gains less than this
  std::uint64_t rng_seed = 0;
  std::optional<QuantumStrategy> initial;  // used for restart 0 instead of a random start
  sdp::Options sdp;
};

struct SeesawTracePoint {
  int step = 0;  // half-steps since the start; 0 is the initial point
  double objective = 0.0;
};

struct SeesawRestart {
  int restart = 0;
  double value = 0.0;
  int iterations = 0;  // full state+measurement iterations
  bool valid = true;   // passed re-validation
  std::string error;
};

struct SeesawResult {
  double value = 0.0;
  QuantumStrategy strategy;
  std::vector<SeesawTracePoint> trace;  // of the restart that produced value
  int best_restart = 0;
  std::vector<SeesawRestart> restarts;
  double obliviousness_deviation = 0.0;
};

/// Sum over x, y, b of p_A p_B payoff-weighted Re Tr(rho_x B_b^y), without
/// any clipping. Equals quantum_performance on valid strategies.
double seesaw_objective(const Game& g, const std::vector<ComplexMatrix>& states,
                        const std::vector<std::vector<ComplexMatrix>>& measurements);

struct MeasurementStep {
  std::vector<std::vector<ComplexMatrix>> measurements;
  double objective = 0.0;
};

struct StateStep {
  std::vector<ComplexMatrix> states;
  double objective = 0.0;
};

/// Best POVMs for fixed states. If incumbent is given, the result is never
/// worse than it (the incumbent is returned when the solve does not improve).
MeasurementStep optimize_measurements(const Game& g, const std::vector<ComplexMatrix>& states,
                                      const std::vector<std::vector<ComplexMatrix>>* incumbent = nullptr,
                                      const sdp::Options& opts = {});

/// Best oblivious states for fixed POVMs, same incumbent rule.
StateStep optimize_states(const Game& g, const std::vector<std::vector<ComplexMatrix>>& measurements,
                          const std::vector<ComplexMatrix>* incumbent = nullptr,
                          const sdp::Options& opts = {});

/// Repairs states onto the oblivious set: unit trace, exact linear
/// obliviousness, then the least mixing with I/dim that makes every state PSD.
std::vector<ComplexMatrix> repair_states(const Game& g, std::vector<ComplexMatrix> states);

/// Repairs a POVM: Hermitian, exact completeness, least mixing with I/K for PSD.
std::vector<ComplexMatrix> repair_povm(std::vector<ComplexMatrix> povm);

SeesawResult seesaw(const Game& g, const SeesawConfig& cfg);

/// Diagonal embedding of a classical strategy: message m becomes |m><m| in
/// dimension alphabet_size, decoding becomes a projective measurement.
QuantumStrategy embed_classical(const Game& g, const ClassicalStrategy& s);

/// "step,objective" lines with a header.
std::string seesaw_trace_csv(const std::vector<SeesawTracePoint>& trace);

}  // namespace pnc
