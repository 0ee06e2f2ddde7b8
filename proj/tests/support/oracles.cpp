#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oracle {

using pnc::Complex;
using pnc::ConditionalDistribution;
using pnc::Game;
using pnc::Rational;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& m, int da, int db) {
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int i = 0; i < da; ++i)
    for (int k = 0; k < db; ++k)
      for (int l = 0; l < db; ++l) out(k, l) += m(i * db + k, i * db + l);
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double worst = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

double performance(const Game& g, const ConditionalDistribution& d) {
  double total = 0;
  for (int x = 0; x < g.alice_inputs; ++x)
    for (int y = 0; y < g.bob_inputs; ++y)
      for (int k = 0; k < g.num_tasks(); ++k)
        total += g.prior_alice[x] * g.prior_bob[y] * g.payoffs[k](x, y) * d(x, y, g.tasks[k](x, y));
  return total;
}

ConditionalDistribution born(const pnc::QuantumStrategy& qs) {
  const int nx = static_cast<int>(qs.states.size());
  const int ny = static_cast<int>(qs.measurements.size());
  const int nb = static_cast<int>(qs.measurements.front().size());
  ConditionalDistribution d(nx, ny, nb);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int b = 0; b < nb; ++b) {
        Complex t = 0;
        const auto& rho = qs.states[x];
        const auto& e = qs.measurements[y][b];
        for (int i = 0; i < qs.dim; ++i)
          for (int j = 0; j < qs.dim; ++j) t += rho(i, j) * e(j, i);
        d(x, y, b) = t.real();
      }
  return d;
}

bool balanced(const Game& g, const std::vector<int>& enc, int alphabet, double tol) {
  for (const auto& part : g.partitions.partitions) {
    for (int m = 0; m < alphabet; ++m) {
      std::vector<double> share;
      for (const auto& cell : part.cells) {
        double q = 0, in = 0;
        for (int x : cell) {
          q += g.prior_alice[x];
          if (enc[x] == m) in += g.prior_alice[x];
        }
        share.push_back(in / q);
      }
      for (double s : share)
        if (std::abs(s - share.front()) > tol) return false;
    }
  }
  return true;
}

namespace {

// Contribution of message class m at setting y when Bob answers b.
double class_score(const Game& g, const std::vector<int>& enc, int m, int y, int b) {
  double s = 0;
  for (int x = 0; x < g.alice_inputs; ++x) {
    if (enc[x] != m) continue;
    for (int k = 0; k < g.num_tasks(); ++k)
      if (g.tasks[k](x, y) == b) s += g.prior_alice[x] * g.prior_bob[y] * g.payoffs[k](x, y);
  }
  return s;
}

bool next_word(std::vector<int>& w, int base) {
  for (auto& v : w) {
    if (++v < base) return true;
    v = 0;
  }
  return false;
}

}  // namespace

double brute_force_bound(const Game& g, int alphabet) {
  std::vector<int> enc(g.alice_inputs, 0);
  double best = -INFINITY;
  do {
    if (!balanced(g, enc, alphabet)) continue;
    double v = 0;
    for (int m = 0; m < alphabet; ++m)
      for (int y = 0; y < g.bob_inputs; ++y) {
        double top = -INFINITY;
        for (int b = 0; b < g.num_outcomes; ++b) top = std::max(top, class_score(g, enc, m, y, b));
        v += top;
      }
    best = std::max(best, v);
  } while (next_word(enc, alphabet));
  return best;
}

double best_decoding_exhaustive(const Game& g, const std::vector<int>& enc, int alphabet) {
  std::vector<int> dec(static_cast<std::size_t>(alphabet) * g.bob_inputs, 0);
  double best = -INFINITY;
  do {
    pnc::ConditionalDistribution d(g.alice_inputs, g.bob_inputs, g.num_outcomes);
    for (int x = 0; x < g.alice_inputs; ++x)
      for (int y = 0; y < g.bob_inputs; ++y) d(x, y, dec[enc[x] * g.bob_inputs + y]) = 1.0;
    best = std::max(best, oracle::performance(g, d));
  } while (next_word(dec, g.num_outcomes));
  return best;
}

Rational exact_performance(const Game& g, const pnc::ClassicalStrategy& s) {
  // Continued fractions, accepting the first convergent within 1e-14.
  auto frac = [](double v) {
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = v;
    for (int i = 0; i < 40 && k1 <= 1'000'000; ++i) {
      const auto a = static_cast<std::int64_t>(std::floor(r));
      const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
      h0 = h1, h1 = h2, k0 = k1, k1 = k2;
      if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - v) <= 1e-14) return Rational(h1, k1);
      if (r == static_cast<double>(a)) break;
      r = 1.0 / (r - static_cast<double>(a));
    }
    throw std::runtime_error("not a small fraction: " + std::to_string(v));
  };
  Rational total(0);
  for (int x = 0; x < g.alice_inputs; ++x)
    for (int y = 0; y < g.bob_inputs; ++y) {
      const int b = s.decoding(s.encoding[x], y);
      for (int k = 0; k < g.num_tasks(); ++k)
        if (g.tasks[k](x, y) == b)
          total += frac(g.prior_alice[x]) * frac(g.prior_bob[y]) * frac(g.payoffs[k](x, y));
    }
  return total;
}

double cglmp_mixed(int d) {
  const double pi = std::numbers::pi;
  auto csc2 = [](double t) { return 1.0 / (std::sin(t) * std::sin(t)); };
  double s = 0;
  for (int r = 0; r < d / 2; ++r)
    s += (1.0 - 2.0 * r / (d - 1)) * (csc2(pi * (r + 0.25) / d) - csc2(pi * (r + 0.75) / d));
  return s / (2.0 * d * d);
}

Rational rac_bound(int n, int d) { return Rational(n + d - 1, static_cast<std::int64_t>(n) * d); }

ComplexMatrix random_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

ComplexMatrix random_hermitian(Rng& rng, int dim) {
  ComplexMatrix m = random_matrix(rng, dim, dim);
  return (m + m.adjoint()) / 2.0;
}

ComplexMatrix random_density(Rng& rng, int dim) {
  ComplexMatrix g = random_matrix(rng, dim, dim);
  ComplexMatrix r = g * g.adjoint();
  r /= r.trace().real();
  return (r + r.adjoint()) / 2.0;
}

std::vector<ComplexMatrix> random_povm(Rng& rng, int dim, int outcomes) {
  std::vector<ComplexMatrix> m;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int b = 0; b < outcomes; ++b) {
    ComplexMatrix g = random_matrix(rng, dim, dim);
    m.push_back(g * g.adjoint());
    sum += m.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sum);
  const ComplexMatrix w = es.operatorInverseSqrt();
  for (auto& e : m) {
    e = w * e * w;
    e = (e + e.adjoint()) / 2.0;
  }
  // Push the rounding residue into the last element.
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (int b = 0; b + 1 < outcomes; ++b) total += m[b];
  m.back() = ComplexMatrix::Identity(dim, dim) - total;
  return m;
}

std::vector<double> random_prior(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> p(n);
  double s = 0;
  for (auto& v : p) s += (v = u(rng));
  for (auto& v : p) v /= s;
  return p;
}

Game random_game(Rng& rng, const GameShape& shape) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<double> pay(-1.0, 1.0);
  Game g;
  g.alice_inputs = pick(1, shape.max_alice);
  g.bob_inputs = pick(1, shape.max_bob);
  g.num_outcomes = pick(1, shape.max_outcomes);
  g.prior_alice = random_prior(rng, g.alice_inputs);
  g.prior_bob = random_prior(rng, g.bob_inputs);
  const int tasks = pick(1, g.num_outcomes);
  g.tasks.assign(tasks, pnc::Table<int>(g.alice_inputs, g.bob_inputs));
  g.payoffs.assign(tasks, pnc::Table<double>(g.alice_inputs, g.bob_inputs));
  std::vector<int> perm(g.num_outcomes);
  for (int x = 0; x < g.alice_inputs; ++x)
    for (int y = 0; y < g.bob_inputs; ++y) {
      for (int b = 0; b < g.num_outcomes; ++b) perm[b] = b;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int k = 0; k < tasks; ++k) {
        g.tasks[k](x, y) = perm[k];
        g.payoffs[k](x, y) = pay(rng);
      }
    }
  if (shape.partitions && g.alice_inputs >= 2) {
    const int parts = pick(0, 2);
    for (int p = 0; p < parts; ++p) {
      std::vector<int> xs(g.alice_inputs);
      for (int x = 0; x < g.alice_inputs; ++x) xs[x] = x;
      std::shuffle(xs.begin(), xs.end(), rng);
      const int cells = pick(2, g.alice_inputs);
      pnc::Partition part;
      part.cells.resize(cells);
      for (int c = 0; c < g.alice_inputs; ++c) part.cells[c < cells ? c : pick(0, cells - 1)].push_back(xs[c]);
      for (auto& c : part.cells) std::sort(c.begin(), c.end());
      g.partitions.partitions.push_back(std::move(part));
    }
  }
  g.validate();
  return g;
}

pnc::ClassicalStrategy random_classical(Rng& rng, const Game& g, int max_alphabet) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  pnc::ClassicalStrategy s;
  s.alphabet_size = pick(1, max_alphabet);
  s.encoding.resize(g.alice_inputs);
  for (auto& e : s.encoding) e = pick(0, s.alphabet_size - 1);
  s.decoding = pnc::Table<int>(s.alphabet_size, g.bob_inputs);
  for (int m = 0; m < s.alphabet_size; ++m)
    for (int y = 0; y < g.bob_inputs; ++y) s.decoding(m, y) = pick(0, g.num_outcomes - 1);
  return s;
}

}  // namespace oracle
