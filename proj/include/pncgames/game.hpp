#pragma once

// Communication games with obliviousness constraints.
//
// Alice receives x in {0..alice_inputs-1} with prior p_A, Bob receives y with
// prior p_B and outputs b in {0..num_outcomes-1}. Each task k assigns a target
// outcome T_k(x,y) and a payoff $_k(x,y); an outcome matching no task pays 0.
// The obliviousness constraint is stored as its generator: a family of
// partitions of Alice's inputs, none of whose cells Bob may learn anything
// about.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pncgames/rational.hpp"

namespace pnc {

/// Thrown when a game, distribution or file violates an invariant. The message
/// starts with the offending field name.
class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major rows x cols table indexed (x, y).
template <typename T>
class Table {
 public:
  Table() = default;
  Table(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Cell = std::vector<int>;

struct Partition {
  std::vector<Cell> cells;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct PartitionFamily {
  std::vector<Partition> partitions;

  int size() const { return static_cast<int>(partitions.size()); }
  bool empty() const { return partitions.empty(); }
  friend bool operator==(const PartitionFamily&, const PartitionFamily&) = default;
};

struct Game {
  int alice_inputs = 0;
  int bob_inputs = 0;
  int num_outcomes = 0;
  std::vector<double> prior_alice;
  std::vector<double> prior_bob;
  std::vector<Table<int>> tasks;
  std::vector<Table<double>> payoffs;
  PartitionFamily partitions;

  // Exact priors, present when every prior is a small-denominator fraction
  // summing to exactly 1. A cache of prior_alice/prior_bob: equality ignores it.
  std::optional<std::vector<Rational>> exact_prior_alice;
  std::optional<std::vector<Rational>> exact_prior_bob;

  int num_tasks() const { return static_cast<int>(tasks.size()); }

  /// Throws GameError naming the first violated field.
  void validate() const;

  friend bool operator==(const Game& a, const Game& b) {
    return a.alice_inputs == b.alice_inputs && a.bob_inputs == b.bob_inputs &&
           a.num_outcomes == b.num_outcomes && a.prior_alice == b.prior_alice && a.prior_bob == b.prior_bob &&
           a.tasks == b.tasks && a.payoffs == b.payoffs && a.partitions == b.partitions;
  }
};

/// Recovers exact fractions for a prior vector: each entry must be the double
/// of a fraction with denominator <= 10^6 and the fractions must sum to 1.
std::optional<std::vector<Rational>> exact_prior_from(const std::vector<double>& prior);

/// Sets exact_prior_alice/bob from the decimal priors where possible.
void infer_exact_priors(Game& g);

/// q_{i,j}: prior mass of every cell, indexed [partition][cell].
std::vector<std::vector<double>> cell_weights(const Game& g);

/// Exact cell masses; nullopt when the game carries no exact priors.
std::optional<std::vector<std::vector<Rational>>> exact_cell_weights(const Game& g);

/// p(b | x, y), stored densely as [x][y][b].
class ConditionalDistribution {
 public:
  ConditionalDistribution() = default;
  ConditionalDistribution(int alice_inputs, int bob_inputs, int num_outcomes)
      : alice_(alice_inputs),
        bob_(bob_inputs),
        outcomes_(num_outcomes),
        data_(static_cast<std::size_t>(alice_inputs) * bob_inputs * num_outcomes, 0.0) {}

  int alice_inputs() const { return alice_; }
  int bob_inputs() const { return bob_; }
  int num_outcomes() const { return outcomes_; }

  double& operator()(int x, int y, int b) { return data_[index(x, y, b)]; }
  double operator()(int x, int y, int b) const { return data_[index(x, y, b)]; }

  /// Checks nonnegativity and row normalization within tol.
  void validate(double tol = 1e-10) const;

  /// lambda * a + (1 - lambda) * b.
  static ConditionalDistribution mix(double lambda, const ConditionalDistribution& a,
                                     const ConditionalDistribution& b);

 private:
  std::size_t index(int x, int y, int b) const {
    return (static_cast<std::size_t>(x) * bob_ + y) * outcomes_ + b;
  }

  int alice_ = 0;
  int bob_ = 0;
  int outcomes_ = 0;
  std::vector<double> data_;
};

/// score(x, y, b) = p_A(x) p_B(y) sum_k $_k(x,y) [T_k(x,y) = b]. Performance
/// is linear in p(b|x,y) with these coefficients.
class ScoreTable {
 public:
  explicit ScoreTable(const Game& g);

  double operator()(int x, int y, int b) const {
    return data_[(static_cast<std::size_t>(x) * bob_ + y) * outcomes_ + b];
  }
  /// max_b score(x, y, b), the most input x can ever contribute at setting y.
  double best(int x, int y) const { return best_[static_cast<std::size_t>(x) * bob_ + y]; }

  int alice_inputs() const { return alice_; }
  int bob_inputs() const { return bob_; }
  int num_outcomes() const { return outcomes_; }

 private:
  int alice_;
  int bob_;
  int outcomes_;
  std::vector<double> data_;
  std::vector<double> best_;
};

/// Average payoff sum_{x,y} p_A p_B sum_k $_k p(b = T_k | x, y).
double performance(const Game& g, const ConditionalDistribution& d);

struct ObliviousnessReport {
  double max_deviation = 0.0;
  bool passed = true;
  // Where the largest deviation was found.
  int worst_y = -1;
  int worst_b = -1;
};

inline constexpr double kDefaultObliviousTol = 1e-9;

/// Compares the prior-weighted cell averages sum_{x in S} p(b|x,y) p_A(x)/q_S
/// across every cell of every partition, for every (y, b).
ObliviousnessReport check_obliviousness(const Game& g, const ConditionalDistribution& d,
                                        double tol = kDefaultObliviousTol);

}  // namespace pnc
