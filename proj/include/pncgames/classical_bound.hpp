#pragma once

// Preparation-noncontextual bounds by search over deterministic strategies.
//
// A deterministic encoding E sends each Alice input to a message; it respects
// the obliviousness constraint iff every message class R_m is balanced: for
// each partition, sum_{x in R_m ∩ S} p_A(x) / q_S is the same for every cell
// S. For a fixed encoding the best decoding is found independently for every
// (message, y), so the search runs over encodings only.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pncgames/game.hpp"
#include "pncgames/rational.hpp"

namespace pnc {

struct ClassicalStrategy {
  int alphabet_size = 1;
  std::vector<int> encoding;  // x -> message
  Table<int> decoding;        // (message, y) -> outcome

  friend bool operator==(const ClassicalStrategy&, const ClassicalStrategy&) = default;
};

inline constexpr double kBalanceTol = 1e-12;

/// Evaluates the balance condition for message classes. Uses exact integer
/// arithmetic when the game carries exact priors, `tol` otherwise.
class BalanceChecker {
 public:
  explicit BalanceChecker(const Game& g, double tol = kBalanceTol);

  bool balanced(std::span<const int> encoding, int alphabet) const;
  bool exact() const { return exact_; }

 private:
  const Game* game_;
  double tol_;
  bool exact_ = false;
  std::vector<std::int64_t> int_weight_;                 // p_A(x) * common denominator
  std::vector<std::vector<std::int64_t>> int_cell_;      // cell masses, same scale
  std::vector<std::vector<double>> cell_;                // q_{i,j}
};

bool is_balanced(const Game& g, const ClassicalStrategy& s, double tol = kBalanceTol);

/// p(b|x,y) = [b = decoding(E(x), y)].
ConditionalDistribution strategy_distribution(const Game& g, const ClassicalStrategy& s);

/// Best decoding for a fixed encoding: per (message, y) the outcome with the
/// largest accumulated score. Ties go to the smallest outcome index.
Table<int> greedy_decoding(const Game& g, std::span<const int> encoding, int alphabet);

/// Exact rational performance of a deterministic strategy. Available when the
/// game has exact priors and integer payoffs; nullopt otherwise.
std::optional<Rational> exact_performance(const Game& g, const ClassicalStrategy& s);

enum class SearchMode { exact, branch_and_bound };

struct BoundOptions {
  int max_alphabet = 0;  // 0 selects default_max_alphabet(g)
  SearchMode mode = SearchMode::branch_and_bound;
  // Exact mode refuses games with alphabet^|I_A| above this many leaves;
  // branch-and-bound gives up after this many nodes (0 = unlimited).
  std::uint64_t exact_leaf_budget = 100'000'000;
  std::uint64_t bnb_node_budget = 0;
};

struct BoundResult {
  double value = 0.0;
  ClassicalStrategy witness;
  int max_alphabet = 0;
  std::uint64_t nodes = 0;
  // Witness uses every available message, so a larger alphabet might do better.
  bool saturated = false;
  std::optional<Rational> exact_value;
};

/// Cells in the first partition, or |I_A| for unconstrained games.
int default_max_alphabet(const Game& g);

/// Maximum performance over balanced deterministic strategies with at most
/// `max_alphabet` messages. Throws std::runtime_error when the search budget
/// is exceeded.
BoundResult pnc_bound(const Game& g, const BoundOptions& opts = {});

/// Complete search for an encoding with `alphabet` balanced classes. With
/// `all_nonempty`, every message must be used.
std::optional<std::vector<int>> find_balanced_encoding(const Game& g, int alphabet,
                                                       bool all_nonempty);

struct AlphabetCapReport {
  int d = 0;                 // cell size of the grouping partition
  int alphabet = 0;          // d + 1
  std::string method;        // "exhaustive" or "pruned-search"
  std::uint64_t encodings_examined = 0;
  std::uint64_t balanced_found = 0;
  bool confirmed = false;    // no balanced all-nonempty encoding exists
  std::optional<std::vector<int>> witness_at_d;  // a balanced encoding using d messages
};

/// For games whose single partition groups inputs into equal cells of size d,
/// certifies that no balanced encoding uses d+1 non-empty message classes.
AlphabetCapReport max_oblivious_alphabet_check(const Game& g,
                                               std::uint64_t exhaustive_budget = 50'000'000);

}  // namespace pnc
