#include "pncgames/classical_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pnc {

// ---------------------------------------------------------------------------
// Balance

BalanceChecker::BalanceChecker(const Game& g, double tol)
    : game_(&g), tol_(tol), cell_(cell_weights(g)) {
  if (!g.exact_prior_alice) return;
  try {
    std::int64_t lcd = 1;
    for (const auto& p : *g.exact_prior_alice) {
      lcd = std::lcm(lcd, p.den());
      if (lcd <= 0 || lcd > (std::int64_t{1} << 40)) throw std::overflow_error("lcd");
    }
    int_weight_.reserve(g.alice_inputs);
    for (const auto& p : *g.exact_prior_alice) int_weight_.push_back(p.num() * (lcd / p.den()));
    for (const auto& part : g.partitions.partitions) {
      auto& row = int_cell_.emplace_back();
      for (const auto& cell : part.cells) {
        std::int64_t s = 0;
        for (int x : cell) s += int_weight_[x];
        row.push_back(s);
      }
    }
    exact_ = true;
  } catch (const std::overflow_error&) {
    int_weight_.clear();
    int_cell_.clear();
    exact_ = false;
  }
}

bool BalanceChecker::balanced(std::span<const int> encoding, int alphabet) const {
  const Game& g = *game_;
  if (static_cast<int>(encoding.size()) != g.alice_inputs) {
    throw std::invalid_argument("encoding: length must equal alice_inputs");
  }
  for (int m : encoding) {
    if (m < 0 || m >= alphabet) throw std::invalid_argument("encoding: message out of range");
  }
  for (int j = 0; j < g.partitions.size(); ++j) {
    const auto& cells = g.partitions.partitions[j].cells;
    const std::size_t nc = cells.size();
    if (exact_) {
      // mass[m][i] * Q_0 == mass[m][0] * Q_i for every class m and cell i
      std::vector<std::int64_t> mass(static_cast<std::size_t>(alphabet) * nc, 0);
      for (std::size_t i = 0; i < nc; ++i) {
        for (int x : cells[i]) mass[encoding[x] * nc + i] += int_weight_[x];
      }
      for (int m = 0; m < alphabet; ++m) {
        const __int128 ref = static_cast<__int128>(mass[m * nc]);
        for (std::size_t i = 1; i < nc; ++i) {
          const __int128 lhs = static_cast<__int128>(mass[m * nc + i]) * int_cell_[j][0];
          if (lhs != ref * int_cell_[j][i]) return false;
        }
      }
    } else {
      std::vector<double> mass(static_cast<std::size_t>(alphabet) * nc, 0.0);
      for (std::size_t i = 0; i < nc; ++i) {
        for (int x : cells[i]) mass[encoding[x] * nc + i] += g.prior_alice[x];
      }
      for (int m = 0; m < alphabet; ++m) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < nc; ++i) {
          const double v = mass[m * nc + i] / cell_[j][i];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (hi - lo > tol_) return false;
      }
    }
  }
  return true;
}

bool is_balanced(const Game& g, const ClassicalStrategy& s, double tol) {
  return BalanceChecker(g, tol).balanced(s.encoding, s.alphabet_size);
}

// ---------------------------------------------------------------------------
// Strategies

ConditionalDistribution strategy_distribution(const Game& g, const ClassicalStrategy& s) {
  if (static_cast<int>(s.encoding.size()) != g.alice_inputs ||
      s.decoding.rows() != s.alphabet_size || s.decoding.cols() != g.bob_inputs) {
    throw std::invalid_argument("strategy: shape does not match the game");
  }
  ConditionalDistribution d(g.alice_inputs, g.bob_inputs, g.num_outcomes);
  for (int x = 0; x < g.alice_inputs; ++x) {
    const int m = s.encoding[x];
    if (m < 0 || m >= s.alphabet_size) throw std::invalid_argument("strategy: message out of range");
    for (int y = 0; y < g.bob_inputs; ++y) {
      const int b = s.decoding(m, y);
      if (b < 0 || b >= g.num_outcomes) throw std::invalid_argument("strategy: outcome out of range");
      d(x, y, b) = 1.0;
    }
  }
  return d;
}

namespace {

Table<int> greedy_decoding_from(const ScoreTable& score, std::span<const int> encoding,
                                int alphabet) {
  const int nb = score.bob_inputs();
  const int no = score.num_outcomes();
  std::vector<double> acc(static_cast<std::size_t>(alphabet) * nb * no, 0.0);
  for (std::size_t x = 0; x < encoding.size(); ++x) {
    for (int y = 0; y < nb; ++y) {
      for (int b = 0; b < no; ++b) {
        acc[(static_cast<std::size_t>(encoding[x]) * nb + y) * no + b] +=
            score(static_cast<int>(x), y, b);
      }
    }
  }
  Table<int> dec(alphabet, nb, 0);
  for (int m = 0; m < alphabet; ++m) {
    for (int y = 0; y < nb; ++y) {
      const double* row = &acc[(static_cast<std::size_t>(m) * nb + y) * no];
      dec(m, y) = static_cast<int>(std::max_element(row, row + no) - row);
    }
  }
  return dec;
}

}  // namespace

Table<int> greedy_decoding(const Game& g, std::span<const int> encoding, int alphabet) {
  return greedy_decoding_from(ScoreTable(g), encoding, alphabet);
}

std::optional<Rational> exact_performance(const Game& g, const ClassicalStrategy& s) {
  if (!g.exact_prior_alice || !g.exact_prior_bob) return std::nullopt;
  for (const auto& table : g.payoffs) {
    for (double v : table.data()) {
      if (v != std::round(v)) return std::nullopt;
    }
  }
  Rational total(0);
  for (int x = 0; x < g.alice_inputs; ++x) {
    for (int y = 0; y < g.bob_inputs; ++y) {
      const int b = s.decoding(s.encoding[x], y);
      std::int64_t pay = 0;
      for (int k = 0; k < g.num_tasks(); ++k) {
        if (g.tasks[k](x, y) == b) pay += static_cast<std::int64_t>(g.payoffs[k](x, y));
      }
      if (pay != 0) total += (*g.exact_prior_alice)[x] * (*g.exact_prior_bob)[y] * Rational(pay);
    }
  }
  return total;
}

int default_max_alphabet(const Game& g) {
  if (g.partitions.empty()) return g.alice_inputs;
  return static_cast<int>(g.partitions.partitions.front().cells.size());
}

// ---------------------------------------------------------------------------
// Search

namespace {

// Depth-first search over encodings in canonical (first-occurrence) labeling.
// Message labels are interchangeable for both balance and decoding, so only
// restricted-growth assignments are visited.
class EncodingSearch {
 public:
  EncodingSearch(const Game& g, const ScoreTable* score, int alphabet)
      : g_(g), score_(score), alphabet_(alphabet), checker_(g) {
    const int n = g.alice_inputs;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return g.prior_alice[a] > g.prior_alice[b];
    });

    cell_of_.assign(n, {});
    for (const auto& part : g.partitions.partitions) {
      for (const auto& cell : part.cells) {
        double q = 0.0;
        for (int x : cell) q += g.prior_alice[x];
        for (int x : cell) cell_of_[x].push_back(static_cast<int>(q_.size()));
        q_.push_back(q);
      }
    }
    rem_ = q_;
    mass_.assign(static_cast<std::size_t>(alphabet_) * q_.size(), 0.0);
    class_size_.assign(alphabet_, 0);
    encoding_.assign(n, -1);

    if (score_) {
      const int nb = g.bob_inputs;
      const int no = g.num_outcomes;
      acc_.assign(static_cast<std::size_t>(alphabet_) * nb * no, 0.0);
      class_value_.assign(alphabet_, 0.0);
      suffix_best_.assign(n + 1, 0.0);
      for (int pos = n - 1; pos >= 0; --pos) {
        double s = 0.0;
        for (int y = 0; y < nb; ++y) s += score_->best(order_[pos], y);
        suffix_best_[pos] = suffix_best_[pos + 1] + s;
      }
    }
  }

  void set_node_budget(std::uint64_t b) { budget_ = b; }
  void set_require_all_nonempty(bool v) { all_nonempty_ = v; }
  void set_stop_at_first(bool v) { stop_at_first_ = v; }
  void set_incumbent(double v) { incumbent_ = v; }

  void run() { dfs(0, 0); }

  std::uint64_t nodes() const { return nodes_; }
  bool found() const { return found_; }
  double best_value() const { return incumbent_; }
  const std::vector<int>& best_encoding() const { return best_; }

 private:
  void assign(int x, int m, double sign) {
    class_size_[m] += sign > 0 ? 1 : -1;
    const double w = g_.prior_alice[x] * sign;
    for (int f : cell_of_[x]) {
      mass_[m * q_.size() + f] += w;
      rem_[f] -= w;
    }
    if (score_) {
      const int nb = g_.bob_inputs;
      const int no = g_.num_outcomes;
      double v = 0.0;
      for (int y = 0; y < nb; ++y) {
        double* row = &acc_[(static_cast<std::size_t>(m) * nb + y) * no];
        for (int b = 0; b < no; ++b) row[b] += sign * (*score_)(x, y, b);
        v += class_size_[m] ? *std::max_element(row, row + no) : 0.0;
      }
      class_value_[m] = v;
    }
  }

  // Each class must end with the same normalized mass in every cell. The
  // largest normalized mass seen so far is a lower bound on that level; the
  // unassigned mass left in a cell must cover every class's shortfall there.
  bool feasible(int used) const {
    const std::size_t nf = q_.size();
    if (nf == 0) return true;
    need_.assign(nf, 0.0);
    for (int m = 0; m < used; ++m) {
      const double* mass = &mass_[m * nf];
      double level = 0.0;
      for (std::size_t f = 0; f < nf; ++f) level = std::max(level, mass[f] / q_[f]);
      for (std::size_t f = 0; f < nf; ++f) need_[f] += level * q_[f] - mass[f];
    }
    for (std::size_t f = 0; f < nf; ++f) {
      if (need_[f] > rem_[f] + 1e-10) return false;
    }
    return true;
  }

  double optimistic(int pos) const {
    double v = suffix_best_[pos];
    for (double c : class_value_) v += c;
    return v;
  }

  void dfs(int pos, int used) {
    if (budget_ && nodes_ >= budget_) {
      throw std::runtime_error("search node budget exhausted after " + std::to_string(nodes_) +
                               " nodes");
    }
    ++nodes_;
    const int n = g_.alice_inputs;
    if (pos == n) {
      if (all_nonempty_ && used != alphabet_) return;
      if (!checker_.balanced(encoding_, alphabet_)) return;
      if (!score_) {
        found_ = true;
        best_ = encoding_;
        return;
      }
      double v = 0.0;
      for (double c : class_value_) v += c;
      if (v > incumbent_) {
        found_ = true;
        incumbent_ = v;
        best_ = encoding_;
      }
      return;
    }
    if (all_nonempty_ && n - pos < alphabet_ - used) return;
    const int x = order_[pos];
    const int limit = std::min(used + 1, alphabet_);
    for (int m = 0; m < limit; ++m) {
      encoding_[x] = m;
      assign(x, m, 1.0);
      const int next_used = std::max(used, m + 1);
      bool go = feasible(next_used);
      if (go && score_) go = optimistic(pos + 1) > incumbent_ + 1e-13;
      if (go) dfs(pos + 1, next_used);
      assign(x, m, -1.0);
      encoding_[x] = -1;
      if (stop_at_first_ && found_) return;
    }
  }

  const Game& g_;
  const ScoreTable* score_;
  int alphabet_;
  BalanceChecker checker_;
  std::vector<int> order_;
  std::vector<std::vector<int>> cell_of_;
  std::vector<double> q_;
  std::vector<double> rem_;
  std::vector<double> mass_;
  std::vector<int> class_size_;
  std::vector<int> encoding_;
  std::vector<double> acc_;
  std::vector<double> class_value_;
  std::vector<double> suffix_best_;
  mutable std::vector<double> need_;

  std::uint64_t budget_ = 0;
  std::uint64_t nodes_ = 0;
  bool all_nonempty_ = false;
  bool stop_at_first_ = false;
  bool found_ = false;
  double incumbent_ = -std::numeric_limits<double>::infinity();
  std::vector<int> best_;
};

double greedy_value(const ScoreTable& score, std::span<const int> encoding, int alphabet) {
  const Table<int> dec = greedy_decoding_from(score, encoding, alphabet);
  double v = 0.0;
  for (std::size_t x = 0; x < encoding.size(); ++x) {
    for (int y = 0; y < score.bob_inputs(); ++y) {
      v += score(static_cast<int>(x), y, dec(encoding[x], y));
    }
  }
  return v;
}

// Relabels messages by first occurrence so equivalent witnesses print alike.
std::vector<int> canonical(std::span<const int> encoding) {
  std::vector<int> map;
  std::vector<int> out(encoding.size());
  for (std::size_t x = 0; x < encoding.size(); ++x) {
    const int m = encoding[x];
    if (m >= static_cast<int>(map.size())) map.resize(m + 1, -1);
    if (map[m] < 0) map[m] = static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
    out[x] = map[m];
  }
  return out;
}

std::uint64_t checked_power(std::uint64_t base, int exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
    r *= base;
  }
  return r;
}

// Odometer over all alphabet^n encodings.
template <typename Visit>
void for_each_encoding(int n, int alphabet, Visit&& visit) {
  std::vector<int> enc(n, 0);
  while (true) {
    visit(std::span<const int>(enc));
    int i = n - 1;
    while (i >= 0 && ++enc[i] == alphabet) enc[i--] = 0;
    if (i < 0) return;
  }
}

}  // namespace

BoundResult pnc_bound(const Game& g, const BoundOptions& opts) {
  g.validate();
  int alphabet = opts.max_alphabet > 0 ? opts.max_alphabet : default_max_alphabet(g);
  if (opts.max_alphabet < 0) throw std::invalid_argument("max_alphabet must be at least 1");
  alphabet = std::min(alphabet, g.alice_inputs);

  const ScoreTable score(g);
  BoundResult result;
  result.max_alphabet = alphabet;
  std::vector<int> best_encoding;

  if (opts.mode == SearchMode::exact) {
    const std::uint64_t leaves =
        checked_power(static_cast<std::uint64_t>(alphabet), g.alice_inputs, opts.exact_leaf_budget);
    if (leaves > opts.exact_leaf_budget) {
      throw std::runtime_error("exact search would visit more than " +
                               std::to_string(opts.exact_leaf_budget) +
                               " encodings; use branch_and_bound mode");
    }
    const BalanceChecker checker(g);
    double best = -std::numeric_limits<double>::infinity();
    for_each_encoding(g.alice_inputs, alphabet, [&](std::span<const int> enc) {
      ++result.nodes;
      if (!checker.balanced(enc, alphabet)) return;
      const double v = greedy_value(score, enc, alphabet);
      if (v > best) {
        best = v;
        best_encoding.assign(enc.begin(), enc.end());
      }
    });
  } else {
    EncodingSearch search(g, &score, alphabet);
    search.set_node_budget(opts.bnb_node_budget);
    // The constant encoding is always balanced and seeds the incumbent.
    const std::vector<int> constant(g.alice_inputs, 0);
    search.set_incumbent(greedy_value(score, constant, alphabet));
    search.run();
    result.nodes = search.nodes();
    best_encoding = search.found() ? search.best_encoding() : constant;
  }

  result.witness.alphabet_size = alphabet;
  result.witness.encoding = canonical(best_encoding);
  result.witness.decoding = greedy_decoding_from(score, result.witness.encoding, alphabet);
  result.value = performance(g, strategy_distribution(g, result.witness));
  result.exact_value = exact_performance(g, result.witness);
  const int used = 1 + *std::max_element(result.witness.encoding.begin(), result.witness.encoding.end());
  result.saturated = used == alphabet && alphabet < g.alice_inputs;
  return result;
}

std::optional<std::vector<int>> find_balanced_encoding(const Game& g, int alphabet,
                                                       bool all_nonempty) {
  if (alphabet < 1) throw std::invalid_argument("alphabet must be at least 1");
  if (all_nonempty && alphabet > g.alice_inputs) return std::nullopt;
  EncodingSearch search(g, nullptr, alphabet);
  search.set_require_all_nonempty(all_nonempty);
  search.set_stop_at_first(true);
  search.run();
  if (!search.found()) return std::nullopt;
  return search.best_encoding();
}

AlphabetCapReport max_oblivious_alphabet_check(const Game& g, std::uint64_t exhaustive_budget) {
  g.validate();
  if (g.partitions.size() != 1) {
    throw std::invalid_argument("alphabet cap check needs exactly one partition");
  }
  const auto& cells = g.partitions.partitions.front().cells;
  const int d = static_cast<int>(cells.front().size());
  for (const auto& c : cells) {
    if (static_cast<int>(c.size()) != d) {
      throw std::invalid_argument("alphabet cap check needs equal-size cells");
    }
  }

  AlphabetCapReport report;
  report.d = d;
  report.alphabet = d + 1;
  const int n = g.alice_inputs;
  const std::uint64_t total =
      checked_power(static_cast<std::uint64_t>(d + 1), n, exhaustive_budget);
  if (total <= exhaustive_budget) {
    report.method = "exhaustive";
    const BalanceChecker checker(g);
    std::vector<int> seen(d + 1);
    for_each_encoding(n, d + 1, [&](std::span<const int> enc) {
      ++report.encodings_examined;
      std::fill(seen.begin(), seen.end(), 0);
      for (int m : enc) seen[m] = 1;
      if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return;
      if (checker.balanced(enc, d + 1)) ++report.balanced_found;
    });
  } else {
    report.method = "pruned-search";
    EncodingSearch search(g, nullptr, d + 1);
    search.set_require_all_nonempty(true);
    search.set_stop_at_first(true);
    search.run();
    report.encodings_examined = search.nodes();
    report.balanced_found = search.found() ? 1 : 0;
  }
  report.confirmed = report.balanced_found == 0;
  report.witness_at_d = find_balanced_encoding(g, d, true);
  return report;
}

}  // namespace pnc
