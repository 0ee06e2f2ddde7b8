#include "pncgames/quantum_eval.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pnc {

namespace {
constexpr double kClip = 1e-10;
}

void QuantumStrategy::validate() const {
  if (dim < 1) throw std::invalid_argument("dim: must be at least 1");
  if (states.empty()) throw std::invalid_argument("states: at least one state required");
  if (measurements.empty()) throw std::invalid_argument("measurements: at least one POVM required");
  for (std::size_t x = 0; x < states.size(); ++x) {
    const std::string what = "states[" + std::to_string(x) + "]";
    if (states[x].rows() != dim || states[x].cols() != dim) {
      throw std::invalid_argument(what + ": dimension differs from dim");
    }
    validate_density(states[x], what.c_str());
  }
  const std::size_t outcomes = measurements.front().size();
  for (std::size_t y = 0; y < measurements.size(); ++y) {
    const std::string what = "measurements[" + std::to_string(y) + "]";
    if (measurements[y].size() != outcomes) {
      throw std::invalid_argument(what + ": outcome count differs between settings");
    }
    for (const auto& e : measurements[y]) {
      if (e.rows() != dim || e.cols() != dim) {
        throw std::invalid_argument(what + ": dimension differs from dim");
      }
    }
    validate_povm(measurements[y], what.c_str());
  }
}

ConditionalDistribution born_distribution(const QuantumStrategy& qs) {
  qs.validate();
  const int nx = static_cast<int>(qs.states.size());
  const int ny = static_cast<int>(qs.measurements.size());
  const int nb = static_cast<int>(qs.measurements.front().size());
  ConditionalDistribution d(nx, ny, nb);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      double sum = 0.0;
      for (int b = 0; b < nb; ++b) {
        double p = trace_product(qs.states[x], qs.measurements[y][b]).real();
        if (p < 0.0) {
          if (p < -kClip) {
            std::ostringstream msg;
            msg << "Born probability " << p << " at x=" << x << ", y=" << y << ", b=" << b;
            throw std::invalid_argument(msg.str());
          }
          p = 0.0;
        }
        d(x, y, b) = p;
        sum += p;
      }
      for (int b = 0; b < nb; ++b) d(x, y, b) /= sum;
    }
  }
  return d;
}

double quantum_performance(const Game& g, const QuantumStrategy& qs) {
  if (static_cast<int>(qs.states.size()) != g.alice_inputs ||
      static_cast<int>(qs.measurements.size()) != g.bob_inputs ||
      static_cast<int>(qs.measurements.front().size()) != g.num_outcomes) {
    throw std::invalid_argument("strategy: shape does not match the game");
  }
  return performance(g, born_distribution(qs));
}

QuantumObliviousnessReport check_quantum_obliviousness(const Game& g, const QuantumStrategy& qs,
                                                       double tol) {
  if (static_cast<int>(qs.states.size()) != g.alice_inputs) {
    throw std::invalid_argument("strategy: number of states does not match alice_inputs");
  }
  QuantumObliviousnessReport report;
  const auto q = cell_weights(g);
  const ComplexMatrix mixed = identity(qs.dim) / static_cast<double>(qs.dim);
  std::vector<const ComplexMatrix*> all;
  for (int j = 0; j < g.partitions.size(); ++j) {
    const auto& cells = g.partitions.partitions[j].cells;
    auto& avgs = report.cell_averages.emplace_back();
    auto& dist = report.distance_to_mixed.emplace_back();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      // Offsets from states[0]: identical states give identical averages exactly.
      ComplexMatrix off = ComplexMatrix::Zero(qs.dim, qs.dim);
      for (int x : cells[i]) off += (g.prior_alice[x] / q[j][i]) * (qs.states[x] - qs.states[0]);
      ComplexMatrix sigma = qs.states[0] + off;
      dist.push_back(max_abs_entry(sigma - mixed));
      report.max_distance_to_mixed = std::max(report.max_distance_to_mixed, dist.back());
      avgs.push_back(std::move(sigma));
    }
  }
  for (const auto& row : report.cell_averages) {
    for (const auto& s : row) all.push_back(&s);
  }
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      report.max_deviation = std::max(report.max_deviation, max_abs_entry(*all[a] - *all[b]));
    }
  }
  report.passed = report.max_deviation <= tol;
  return report;
}

}  // namespace pnc
