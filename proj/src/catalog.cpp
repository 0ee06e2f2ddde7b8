#include "pncgames/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pnc {

namespace {

int mod(std::int64_t a, int d) {
  const std::int64_t r = a % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

// omega^(quarters/4) with omega = exp(2 pi i / d). The exponent is reduced
// modulo 4d in integers before any trigonometry.
Complex omega_quarter(std::int64_t quarters, int d) {
  const int period = 4 * d;
  const double angle = std::numbers::pi * mod(quarters, period) / (2.0 * d);
  return {std::cos(angle), std::sin(angle)};
}

// cos(2 pi quarters / (4d)), same reduction.
double cos_quarter(std::int64_t quarters, int d) {
  return std::cos(std::numbers::pi * mod(quarters, 4 * d) / (2.0 * d));
}

double cglmp_weight(int k, int d) { return 1.0 - 2.0 * k / (d - 1); }

}  // namespace

Game build_rac(const RacSpec& spec, std::int64_t size_cap) {
  const int n = spec.n;
  const int d = spec.d;
  if (n < 2) throw GameError("n: random access codes need n >= 2");
  if (d < 2) throw GameError("d: random access codes need d >= 2");
  std::int64_t size = 1;
  for (int r = 0; r < n; ++r) {
    size *= d;
    if (size > size_cap) {
      throw GameError("d^n: " + std::to_string(d) + "^" + std::to_string(n) +
                      " exceeds the size cap " + std::to_string(size_cap));
    }
  }
  const int nx = static_cast<int>(size);

  // digits[x][r] = x_{r+1}
  std::vector<std::vector<int>> digits(nx, std::vector<int>(n));
  for (int x = 0; x < nx; ++x) {
    int v = x;
    for (int r = n - 1; r >= 0; --r) {
      digits[x][r] = v % d;
      v /= d;
    }
  }

  Game g;
  g.alice_inputs = nx;
  g.bob_inputs = n;
  g.num_outcomes = d;
  g.exact_prior_alice = std::vector<Rational>(nx, Rational(1, nx));
  g.exact_prior_bob = std::vector<Rational>(n, Rational(1, n));
  g.prior_alice.assign(nx, 1.0 / nx);
  g.prior_bob.assign(n, 1.0 / n);

  Table<int> task(nx, n);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < n; ++y) task(x, y) = digits[x][y];
  }
  g.tasks.push_back(std::move(task));
  g.payoffs.emplace_back(nx, n, 1.0);

  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) < 2) continue;
    Partition part;
    part.cells.resize(d);
    for (int x = 0; x < nx; ++x) {
      int parity = 0;
      for (int r = 0; r < n; ++r) {
        if ((mask >> (n - 1 - r)) & 1) parity += digits[x][r];
      }
      part.cells[parity % d].push_back(x);
    }
    g.partitions.partitions.push_back(std::move(part));
  }
  g.validate();
  return g;
}

Rational rac_pnc_bound(const RacSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("n and d must be positive");
  return Rational(spec.n + spec.d - 1, static_cast<std::int64_t>(spec.n) * spec.d);
}

Game build_cglmp_game(int d) {
  if (d < 2) throw GameError("d: CGLMP needs d >= 2");
  const int nx = 2 * d;
  const int half = d / 2;

  Game g;
  g.alice_inputs = nx;
  g.bob_inputs = 2;
  g.num_outcomes = d;
  g.exact_prior_alice = std::vector<Rational>(nx, Rational(1, nx));
  g.exact_prior_bob = std::vector<Rational>(2, Rational(1, 2));
  g.prior_alice.assign(nx, 1.0 / nx);
  g.prior_bob.assign(2, 0.5);

  for (int k = 0; k < half; ++k) {
    for (int q = 0; q < 2; ++q) {
      Table<int> task(nx, 2);
      const double pay = (q == 0 ? 1.0 : -1.0) * cglmp_weight(k, d);
      for (int x0 = 0; x0 < d; ++x0) {
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            const int sign = ((x + y + q) % 2 == 0) ? 1 : -1;
            task(2 * x0 + x, y) = mod(static_cast<std::int64_t>(x0) - sign * (k + q) - x * y, d);
          }
        }
      }
      g.tasks.push_back(std::move(task));
      g.payoffs.emplace_back(nx, 2, pay);
    }
  }

  Partition by_x;
  by_x.cells.resize(2);
  for (int x0 = 0; x0 < d; ++x0) {
    for (int x = 0; x < 2; ++x) by_x.cells[x].push_back(2 * x0 + x);
  }
  g.partitions.partitions.push_back(std::move(by_x));

  try {
    g.validate();
  } catch (const GameError& e) {
    throw GameError(std::string("cglmp d=") + std::to_string(d) + ": " + e.what());
  }
  return g;
}

Rational cglmp_pnc_bound(int d) {
  if (d < 2) throw std::invalid_argument("d: CGLMP needs d >= 2");
  return Rational(1, 2);
}

std::vector<std::vector<ComplexMatrix>> cglmp_alice_measurements(int d) {
  // |a>_x = d^{-1/2} sum_k omega^{k (a + alpha_x)} |k>, alpha_0 = 0, alpha_1 = 1/2
  std::vector<std::vector<ComplexMatrix>> out(2);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < d; ++a) {
      ComplexVector v(d);
      for (int k = 0; k < d; ++k) v(k) = norm * omega_quarter(static_cast<std::int64_t>(k) * (4 * a + 2 * x), d);
      out[x].push_back(outer(v));
    }
  }
  return out;
}

std::vector<std::vector<ComplexMatrix>> cglmp_bob_measurements(int d) {
  // |b>_y = d^{-1/2} sum_k omega^{k (b - beta_y)} |k>, beta_y = (-1)^y / 4
  std::vector<std::vector<ComplexMatrix>> out(2);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int y = 0; y < 2; ++y) {
    const int beta_quarters = (y == 0) ? 1 : -1;
    for (int b = 0; b < d; ++b) {
      ComplexVector v(d);
      for (int k = 0; k < d; ++k) {
        v(k) = norm * omega_quarter(static_cast<std::int64_t>(k) * (4 * b - beta_quarters), d);
      }
      out[y].push_back(outer(v));
    }
  }
  return out;
}

QuantumStrategy cglmp_quantum_strategy(const CglmpSpec& spec) {
  const int d = spec.d;
  if (d < 2) throw std::invalid_argument("d: CGLMP needs d >= 2");
  if (static_cast<int>(spec.schmidt.size()) != d) {
    throw std::invalid_argument("schmidt: need exactly d coefficients");
  }
  double norm = 0.0;
  for (double g : spec.schmidt) norm += g * g;
  if (!(norm > 0.0)) throw std::invalid_argument("schmidt: coefficients are all zero");

  QuantumStrategy qs;
  qs.dim = d;
  qs.states.resize(2 * d);
  for (int x0 = 0; x0 < d; ++x0) {
    for (int x = 0; x < 2; ++x) {
      // rho[k][j] = gamma_k gamma_j / N * omega^{(k-j)(x0 - delta_{x,1} + alpha_x)}
      const std::int64_t shift_quarters = 4 * x0 - 2 * x;
      ComplexMatrix rho(d, d);
      for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
          rho(k, j) = spec.schmidt[k] * spec.schmidt[j] / norm *
                      omega_quarter(static_cast<std::int64_t>(k - j) * shift_quarters, d);
        }
      }
      qs.states[2 * x0 + x] = std::move(rho);
    }
  }
  qs.measurements = cglmp_bob_measurements(d);
  return qs;
}

double cglmp_value_formula(const CglmpSpec& spec) {
  const int d = spec.d;
  if (d < 2) throw std::invalid_argument("d: CGLMP needs d >= 2");
  if (static_cast<int>(spec.schmidt.size()) != d) {
    throw std::invalid_argument("schmidt: need exactly d coefficients");
  }
  double norm = 0.0;
  for (double g : spec.schmidt) norm += g * g;
  if (!(norm > 0.0)) throw std::invalid_argument("schmidt: coefficients are all zero");

  double total = 0.0;
  for (int r = 0; r < d / 2; ++r) {
    double inner = 0.0;
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        const std::int64_t diff = k - l;
        inner += spec.schmidt[k] * spec.schmidt[l] *
                 (cos_quarter(diff * (4 * r + 1), d) - cos_quarter(diff * (4 * r + 3), d));
      }
    }
    total += cglmp_weight(r, d) * inner;
  }
  return total / (norm * d);
}

double cglmp_mixed_value(int d) {
  if (d < 2) throw std::invalid_argument("d: CGLMP needs d >= 2");
  auto csc2 = [](double t) {
    const double s = std::sin(t);
    return 1.0 / (s * s);
  };
  double total = 0.0;
  for (int r = 0; r < d / 2; ++r) {
    total += cglmp_weight(r, d) * (csc2(std::numbers::pi * (r + 0.25) / d) -
                                   csc2(std::numbers::pi * (r + 0.75) / d));
  }
  return total / (2.0 * d * d);
}

}  // namespace pnc
