#include "pncgames/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pnc {

namespace {

constexpr double kPriorTol = 1e-12;
constexpr double kPayoffSlack = 1e-12;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw GameError(field + ": " + what);
}

void check_prior(const std::vector<double>& prior, int expected, const char* field) {
  if (static_cast<int>(prior.size()) != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " entries, got " << prior.size();
    fail(field, msg.str());
  }
  double sum = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) fail(field, "probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPriorTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", not 1";
    fail(field, msg.str());
  }
}

void check_exact_prior(const std::optional<std::vector<Rational>>& exact,
                       const std::vector<double>& prior, const char* field) {
  if (!exact) return;
  if (exact->size() != prior.size()) fail(field, "exact prior has wrong length");
  Rational sum(0);
  for (std::size_t i = 0; i < exact->size(); ++i) {
    if ((*exact)[i] < Rational(0)) fail(field, "probabilities must be nonnegative");
    if (std::abs((*exact)[i].to_double() - prior[i]) > 1e-15) {
      fail(field, "exact and floating-point priors disagree");
    }
    sum += (*exact)[i];
  }
  if (!(sum == Rational(1))) fail(field, "exact probabilities sum to " + sum.str() + ", not 1");
}

}  // namespace

void Game::validate() const {
  if (alice_inputs < 1) fail("alice_inputs", "must be at least 1");
  if (bob_inputs < 1) fail("bob_inputs", "must be at least 1");
  if (num_outcomes < 1) fail("num_outcomes", "must be at least 1");
  check_prior(prior_alice, alice_inputs, "prior_alice");
  check_prior(prior_bob, bob_inputs, "prior_bob");
  check_exact_prior(exact_prior_alice, prior_alice, "prior_alice");
  check_exact_prior(exact_prior_bob, prior_bob, "prior_bob");

  if (tasks.size() != payoffs.size()) fail("payoffs", "need exactly one payoff table per task");
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& t = tasks[k];
    const auto& p = payoffs[k];
    if (t.rows() != alice_inputs || t.cols() != bob_inputs) {
      fail("tasks", "table " + std::to_string(k) + " has wrong shape");
    }
    if (p.rows() != alice_inputs || p.cols() != bob_inputs) {
      fail("payoffs", "table " + std::to_string(k) + " has wrong shape");
    }
    for (int v : t.data()) {
      if (v < 0 || v >= num_outcomes) {
        fail("tasks", "table " + std::to_string(k) + " has an outcome out of range");
      }
    }
    for (double v : p.data()) {
      if (!std::isfinite(v) || std::abs(v) > 1.0 + kPayoffSlack) {
        fail("payoffs", "table " + std::to_string(k) + " has a payoff outside [-1, 1]");
      }
    }
  }
  for (int x = 0; x < alice_inputs; ++x) {
    for (int y = 0; y < bob_inputs; ++y) {
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        for (std::size_t k2 = k + 1; k2 < tasks.size(); ++k2) {
          if (tasks[k](x, y) == tasks[k2](x, y)) {
            std::ostringstream msg;
            msg << "tasks " << k << " and " << k2 << " coincide at x=" << x << ", y=" << y;
            fail("tasks", msg.str());
          }
        }
      }
    }
  }

  for (int j = 0; j < partitions.size(); ++j) {
    const auto& part = partitions.partitions[j];
    const std::string field = "partitions[" + std::to_string(j) + "]";
    std::vector<int> seen(alice_inputs, 0);
    for (const auto& cell : part.cells) {
      if (cell.empty()) fail(field, "empty cell");
      double q = 0.0;
      for (int x : cell) {
        if (x < 0 || x >= alice_inputs) fail(field, "cell entry out of range");
        if (seen[x]++) fail(field, "cells not disjoint");
        q += prior_alice[x];
      }
      if (!(q > 0.0)) fail(field, "cell has zero prior weight");
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      fail(field, "cells do not cover all Alice inputs");
    }
  }
}

std::vector<std::vector<double>> cell_weights(const Game& g) {
  std::vector<std::vector<double>> q;
  q.reserve(g.partitions.partitions.size());
  for (const auto& part : g.partitions.partitions) {
    auto& row = q.emplace_back();
    for (const auto& cell : part.cells) {
      double s = 0.0;
      for (int x : cell) s += g.prior_alice[x];
      row.push_back(s);
    }
  }
  return q;
}

std::optional<std::vector<std::vector<Rational>>> exact_cell_weights(const Game& g) {
  if (!g.exact_prior_alice) return std::nullopt;
  std::vector<std::vector<Rational>> q;
  for (const auto& part : g.partitions.partitions) {
    auto& row = q.emplace_back();
    for (const auto& cell : part.cells) {
      Rational s(0);
      for (int x : cell) s += (*g.exact_prior_alice)[x];
      row.push_back(s);
    }
  }
  return q;
}

void ConditionalDistribution::validate(double tol) const {
  for (int x = 0; x < alice_; ++x) {
    for (int y = 0; y < bob_; ++y) {
      double s = 0.0;
      for (int b = 0; b < outcomes_; ++b) {
        const double p = (*this)(x, y, b);
        if (!(p >= -tol)) {
          throw GameError("distribution: negative probability at x=" + std::to_string(x) +
                          ", y=" + std::to_string(y));
        }
        s += p;
      }
      if (std::abs(s - 1.0) > tol) {
        throw GameError("distribution: row x=" + std::to_string(x) + ", y=" +
                        std::to_string(y) + " does not sum to 1");
      }
    }
  }
}

ConditionalDistribution ConditionalDistribution::mix(double lambda,
                                                     const ConditionalDistribution& a,
                                                     const ConditionalDistribution& b) {
  if (a.alice_ != b.alice_ || a.bob_ != b.bob_ || a.outcomes_ != b.outcomes_) {
    throw GameError("distribution: cannot mix distributions of different shapes");
  }
  ConditionalDistribution out(a.alice_, a.bob_, a.outcomes_);
  for (std::size_t i = 0; i < out.data_.size(); ++i) {
    out.data_[i] = lambda * a.data_[i] + (1.0 - lambda) * b.data_[i];
  }
  return out;
}

ScoreTable::ScoreTable(const Game& g)
    : alice_(g.alice_inputs),
      bob_(g.bob_inputs),
      outcomes_(g.num_outcomes),
      data_(static_cast<std::size_t>(alice_) * bob_ * outcomes_, 0.0),
      best_(static_cast<std::size_t>(alice_) * bob_, 0.0) {
  for (int x = 0; x < alice_; ++x) {
    for (int y = 0; y < bob_; ++y) {
      const double w = g.prior_alice[x] * g.prior_bob[y];
      const std::size_t base = (static_cast<std::size_t>(x) * bob_ + y) * outcomes_;
      for (int k = 0; k < g.num_tasks(); ++k) {
        data_[base + g.tasks[k](x, y)] += w * g.payoffs[k](x, y);
      }
      double best = data_[base];
      for (int b = 1; b < outcomes_; ++b) best = std::max(best, data_[base + b]);
      best_[static_cast<std::size_t>(x) * bob_ + y] = best;
    }
  }
}

namespace {
void check_shape(const Game& g, const ConditionalDistribution& d) {
  if (d.alice_inputs() != g.alice_inputs || d.bob_inputs() != g.bob_inputs ||
      d.num_outcomes() != g.num_outcomes) {
    throw GameError("distribution: shape does not match the game");
  }
}
}  // namespace

double performance(const Game& g, const ConditionalDistribution& d) {
  check_shape(g, d);
  double total = 0.0;
  for (int x = 0; x < g.alice_inputs; ++x) {
    for (int y = 0; y < g.bob_inputs; ++y) {
      double inner = 0.0;
      for (int k = 0; k < g.num_tasks(); ++k) {
        inner += g.payoffs[k](x, y) * d(x, y, g.tasks[k](x, y));
      }
      total += g.prior_alice[x] * g.prior_bob[y] * inner;
    }
  }
  return total;
}

ObliviousnessReport check_obliviousness(const Game& g, const ConditionalDistribution& d,
                                        double tol) {
  check_shape(g, d);
  ObliviousnessReport report;
  const auto q = cell_weights(g);
  for (int y = 0; y < g.bob_inputs; ++y) {
    for (int b = 0; b < g.num_outcomes; ++b) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int j = 0; j < g.partitions.size(); ++j) {
        const auto& cells = g.partitions.partitions[j].cells;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          // Offsets from a common reference, so an x-independent row gives
          // identical averages with no rounding.
          const double ref = d(0, y, b);
          double off = 0.0;
          for (int x : cells[i]) off += (d(x, y, b) - ref) * g.prior_alice[x];
          const double avg = ref + off / q[j][i];
          lo = std::min(lo, avg);
          hi = std::max(hi, avg);
        }
      }
      if (hi >= lo && hi - lo > report.max_deviation) {
        report.max_deviation = hi - lo;
        report.worst_y = y;
        report.worst_b = b;
      }
    }
  }
  report.passed = report.max_deviation <= tol;
  return report;
}

std::optional<std::vector<Rational>> exact_prior_from(const std::vector<double>& prior) {
  std::vector<Rational> out;
  out.reserve(prior.size());
  Rational sum(0);
  try {
    for (double p : prior) {
      auto r = Rational::from_double(p);
      if (!r || *r < Rational(0)) return std::nullopt;
      sum += *r;
      out.push_back(*r);
    }
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  if (!(sum == Rational(1))) return std::nullopt;
  return out;
}

void infer_exact_priors(Game& g) {
  g.exact_prior_alice = exact_prior_from(g.prior_alice);
  g.exact_prior_bob = exact_prior_from(g.prior_bob);
}

}  // namespace pnc
