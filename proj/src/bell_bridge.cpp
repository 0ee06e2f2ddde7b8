#include "pncgames/bell_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pncgames/catalog.hpp"

namespace pnc {

namespace {

int mod(long long a, int d) {
  const long long r = a % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

std::string at(const BellTerm& t, std::size_t idx) {
  std::ostringstream s;
  s << "terms[" << idx << "] (x=" << t.x << ", y=" << t.y << ", i=" << t.i << ", k=" << t.k << ")";
  return s.str();
}

void check_prior(const std::vector<double>& p, int n, const char* field) {
  if (static_cast<int>(p.size()) != n) {
    throw GameError(std::string(field) + ": expected " + std::to_string(n) + " entries");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw GameError(std::string(field) + ": negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw GameError(std::string(field) + ": does not sum to 1");
}

// Distinct f-values of every (x, y) in order of first appearance, with the
// summed payoff of each.
struct Slots {
  std::vector<int> values;
  std::vector<double> payoffs;
};

std::vector<Slots> collect_slots(const BellScenario& s) {
  std::vector<Slots> out(static_cast<std::size_t>(s.m_a) * s.m_b);
  for (const auto& t : s.terms) {
    auto& sl = out[static_cast<std::size_t>(t.x) * s.m_b + t.y];
    auto it = std::find(sl.values.begin(), sl.values.end(), t.f_value);
    if (it == sl.values.end()) {
      sl.values.push_back(t.f_value);
      sl.payoffs.push_back(t.payoff);
    } else {
      sl.payoffs[it - sl.values.begin()] += t.payoff;
    }
  }
  return out;
}

ComplexMatrix projector_from_observable(const ComplexMatrix& obs, int sign) {
  return 0.5 * (identity(2) + static_cast<double>(sign) * obs);
}

}  // namespace

void BellScenario::validate() const {
  if (m_a < 1) throw GameError("m_a: must be at least 1");
  if (m_b < 1) throw GameError("m_b: must be at least 1");
  if (d < 2) throw GameError("d: must be at least 2");
  check_prior(prior_alice, m_a, "priors.alice");
  check_prior(prior_bob, m_b, "priors.bob");
  if (exact_prior_alice && static_cast<int>(exact_prior_alice->size()) != m_a) {
    throw GameError("priors.alice: exact priors have the wrong length");
  }
  if (exact_prior_bob && static_cast<int>(exact_prior_bob->size()) != m_b) {
    throw GameError("priors.bob: exact priors have the wrong length");
  }
  if (terms.empty()) throw GameError("terms: at least one term required");
  // owner[(x, y, f)] = i that first claimed f
  std::vector<int> owner(static_cast<std::size_t>(m_a) * m_b * d, -1);
  for (std::size_t n = 0; n < terms.size(); ++n) {
    const auto& t = terms[n];
    if (t.x < 0 || t.x >= m_a) throw GameError(at(t, n) + ": x out of range");
    if (t.y < 0 || t.y >= m_b) throw GameError(at(t, n) + ": y out of range");
    if (t.i < 0 || t.k < 0) throw GameError(at(t, n) + ": i and k must be nonnegative");
    if (t.f_value < 0 || t.f_value >= d) throw GameError(at(t, n) + ": f_value out of range");
    if (!std::isfinite(t.payoff)) throw GameError(at(t, n) + ": payoff is not finite");
    int& o = owner[(static_cast<std::size_t>(t.x) * m_b + t.y) * d + t.f_value];
    if (o >= 0 && o != t.i) {
      throw GameError(at(t, n) + ": f_value " + std::to_string(t.f_value) + " also in the range of F^" +
                      std::to_string(o) + "; ranges of different i must be disjoint");
    }
    o = t.i;
  }
}

void BipartiteQuantumSetup::validate() const {
  if (dim_a < 1 || dim_b < 1) throw std::invalid_argument("setup: dimensions must be positive");
  if (density.has_value() == pure.has_value()) {
    throw std::invalid_argument("state: give exactly one of a density matrix or a pure state");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (density) {
    if (density->rows() != n || density->cols() != n) {
      throw std::invalid_argument("state: density matrix must be (dim_a*dim_b) square");
    }
    validate_density(*density, "state");
  } else {
    if (pure->size() != n) throw std::invalid_argument("state: vector length must be dim_a*dim_b");
    if (std::abs(pure->norm() - 1.0) > tol::kStructural) {
      throw std::invalid_argument("state: pure state is not normalized");
    }
  }
  auto check = [](const std::vector<std::vector<ComplexMatrix>>& ms, int dim, const char* field) {
    if (ms.empty()) throw std::invalid_argument(std::string(field) + ": at least one measurement required");
    for (std::size_t m = 0; m < ms.size(); ++m) {
      const std::string what = std::string(field) + "[" + std::to_string(m) + "]";
      for (const auto& e : ms[m]) {
        if (e.rows() != dim || e.cols() != dim) throw std::invalid_argument(what + ": wrong dimension");
      }
      validate_povm(ms[m], what.c_str());
    }
  };
  check(alice_measurements, dim_a, "alice_measurements");
  check(bob_measurements, dim_b, "bob_measurements");
}

void BipartiteQuantumSetup::validate_for(const BellScenario& s) const {
  validate();
  if (static_cast<int>(alice_measurements.size()) != s.m_a) {
    throw std::invalid_argument("alice_measurements: need m_a settings");
  }
  if (static_cast<int>(bob_measurements.size()) != s.m_b) {
    throw std::invalid_argument("bob_measurements: need m_b settings");
  }
  for (const auto& m : alice_measurements) {
    if (static_cast<int>(m.size()) != s.d) throw std::invalid_argument("alice_measurements: need d outcomes");
  }
  for (const auto& m : bob_measurements) {
    if (static_cast<int>(m.size()) != s.d) throw std::invalid_argument("bob_measurements: need d outcomes");
  }
}

ComplexVector schmidt_state(const std::vector<double>& gamma) {
  const int n = static_cast<int>(gamma.size());
  if (n < 1) throw std::invalid_argument("schmidt: empty coefficient vector");
  double norm = 0.0;
  for (double g : gamma) norm += g * g;
  if (!(norm > 0.0)) throw std::invalid_argument("schmidt: coefficients are all zero");
  norm = std::sqrt(norm);
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(n) * n);
  for (int k = 0; k < n; ++k) psi(static_cast<Eigen::Index>(k) * n + k) = gamma[k] / norm;
  return psi;
}

Game bridge_game(const BellScenario& s) {
  s.validate();
  const int d = s.d;
  const int nx = d * s.m_a;
  const auto slots = collect_slots(s);
  std::size_t ntasks = 1;
  for (const auto& sl : slots) ntasks = std::max(ntasks, sl.values.size());

  Game g;
  g.alice_inputs = nx;
  g.bob_inputs = s.m_b;
  g.num_outcomes = d;
  g.prior_alice.resize(nx);
  for (int x0 = 0; x0 < d; ++x0) {
    for (int x = 0; x < s.m_a; ++x) g.prior_alice[x0 * s.m_a + x] = s.prior_alice[x] / d;
  }
  g.prior_bob = s.prior_bob;
  if (s.exact_prior_alice) {
    std::vector<Rational> ex(nx);
    for (int x0 = 0; x0 < d; ++x0) {
      for (int x = 0; x < s.m_a; ++x) ex[x0 * s.m_a + x] = (*s.exact_prior_alice)[x] / Rational(d);
    }
    g.exact_prior_alice = std::move(ex);
  }
  g.exact_prior_bob = s.exact_prior_bob;

  g.tasks.assign(ntasks, Table<int>(nx, s.m_b));
  g.payoffs.assign(ntasks, Table<double>(nx, s.m_b, 0.0));
  for (int x = 0; x < s.m_a; ++x) {
    for (int y = 0; y < s.m_b; ++y) {
      const auto& sl = slots[static_cast<std::size_t>(x) * s.m_b + y];
      std::vector<int> values = sl.values;
      std::vector<double> pays = sl.payoffs;
      // Unused slots get unused values with payoff 0.
      for (int f = 0; values.size() < ntasks; ++f) {
        if (std::find(values.begin(), values.end(), f) == values.end()) {
          values.push_back(f);
          pays.push_back(0.0);
        }
      }
      for (std::size_t t = 0; t < ntasks; ++t) {
        for (int x0 = 0; x0 < d; ++x0) {
          g.tasks[t](x0 * s.m_a + x, y) = mod(static_cast<long long>(x0) + values[t], d);
          g.payoffs[t](x0 * s.m_a + x, y) = pays[t];
        }
      }
    }
  }

  Partition by_x;
  by_x.cells.resize(s.m_a);
  for (int x0 = 0; x0 < d; ++x0) {
    for (int x = 0; x < s.m_a; ++x) by_x.cells[x].push_back(x0 * s.m_a + x);
  }
  g.partitions.partitions.push_back(std::move(by_x));
  g.validate();
  return g;
}

ConditionalDistribution group_strategy_distribution(const BellScenario& s, const std::vector<int>& a,
                                                    const std::vector<int>& b) {
  if (static_cast<int>(a.size()) != s.m_a) throw std::invalid_argument("a: need one value per x");
  if (static_cast<int>(b.size()) != s.m_b) throw std::invalid_argument("b: need one value per y");
  ConditionalDistribution dist(s.d * s.m_a, s.m_b, s.d);
  for (int x0 = 0; x0 < s.d; ++x0) {
    for (int x = 0; x < s.m_a; ++x) {
      for (int y = 0; y < s.m_b; ++y) {
        dist(x0 * s.m_a + x, y, mod(static_cast<long long>(x0) + a[x] + b[y], s.d)) = 1.0;
      }
    }
  }
  return dist;
}

double local_bell_value(const BellScenario& s, const std::vector<int>& a, const std::vector<int>& b) {
  if (static_cast<int>(a.size()) != s.m_a) throw std::invalid_argument("a: need one value per x");
  if (static_cast<int>(b.size()) != s.m_b) throw std::invalid_argument("b: need one value per y");
  double total = 0.0;
  for (const auto& t : s.terms) {
    if (mod(static_cast<long long>(a[t.x]) + b[t.y], s.d) == t.f_value) {
      total += s.prior_alice[t.x] * s.prior_bob[t.y] * t.payoff;
    }
  }
  return total;
}

GroupSweep sweep_group_strategies(const BellScenario& s, long long budget) {
  s.validate();
  const int slots = s.m_a + s.m_b;
  long long count = 1;
  for (int r = 0; r < slots; ++r) {
    count *= s.d;
    if (count > budget) throw std::invalid_argument("group sweep: d^(m_a+m_b) exceeds the budget");
  }
  std::vector<int> digits(slots, 0);
  GroupSweep out;
  bool first = true;
  for (long long n = 0; n < count; ++n) {
    std::vector<int> a(digits.begin(), digits.begin() + s.m_a);
    std::vector<int> b(digits.begin() + s.m_a, digits.end());
    const double v = local_bell_value(s, a, b);
    if (first || v > out.best) {
      first = false;
      out.best = v;
      out.best_a = a;
      out.best_b = b;
    }
    for (int r = slots - 1; r >= 0; --r) {
      if (++digits[r] < s.d) break;
      digits[r] = 0;
    }
  }
  out.assignments = count;
  return out;
}

SteeringResult steer_states(const BipartiteQuantumSetup& setup, double tol) {
  setup.validate();
  const int ma = static_cast<int>(setup.alice_measurements.size());
  const int d = static_cast<int>(setup.alice_measurements.front().size());
  for (const auto& m : setup.alice_measurements) {
    if (static_cast<int>(m.size()) != d) throw std::invalid_argument("alice_measurements: outcome counts differ");
  }
  const int db = setup.dim_b;

  SteeringResult out;
  ComplexMatrix psi;  // dim_a x dim_b coefficient matrix
  if (setup.pure) {
    psi = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        setup.pure->data(), setup.dim_a, db);
    out.reduced_state = psi.transpose() * psi.conjugate();
  } else {
    out.reduced_state = partial_trace_first(*setup.density, setup.dim_a, db);
  }

  // unnormalized[x][a] = Tr_A(A^x_a (x) 1 rho)
  auto steer = [&](const ComplexMatrix& a) -> ComplexMatrix {
    if (setup.pure) return psi.transpose() * a.transpose() * psi.conjugate();
    return partial_trace_first(tensor(a, identity(db)) * *setup.density, setup.dim_a, db);
  };

  out.states.assign(static_cast<std::size_t>(d) * ma, ComplexMatrix());
  for (int x = 0; x < ma; ++x) {
    ComplexMatrix avg = ComplexMatrix::Zero(db, db);
    for (int a = 0; a < d; ++a) {
      ComplexMatrix r = steer(setup.alice_measurements[x][a]);
      const double marginal = r.trace().real();
      const double dev = std::abs(marginal - 1.0 / d);
      out.max_marginal_deviation = std::max(out.max_marginal_deviation, dev);
      if (dev > tol) {
        std::ostringstream msg;
        msg << "steer_states: Alice's marginal P(a=" << a << "|x=" << x << ") = " << marginal
            << " is not 1/" << d << " (tolerance " << tol << ")";
        throw std::invalid_argument(msg.str());
      }
      avg += r;
      const int x0 = mod(-static_cast<long long>(a), d);
      ComplexMatrix rho = static_cast<double>(d) * r;
      out.states[static_cast<std::size_t>(x0) * ma + x] = 0.5 * (rho + rho.adjoint());
    }
    out.max_average_deviation = std::max(out.max_average_deviation, max_abs_entry(avg - out.reduced_state));
  }
  return out;
}

QuantumStrategy steered_strategy(const BipartiteQuantumSetup& setup, double tol) {
  auto st = steer_states(setup, tol);
  QuantumStrategy qs;
  qs.dim = setup.dim_b;
  qs.states = std::move(st.states);
  qs.measurements = setup.bob_measurements;
  return qs;
}

double bell_value(const BellScenario& s, const BipartiteQuantumSetup& setup) {
  s.validate();
  setup.validate_for(s);
  const int d = s.d;
  // joint[x][y][a][b] = Tr((A^x_a (x) B^y_b) rho)
  std::vector<double> joint(static_cast<std::size_t>(s.m_a) * s.m_b * d * d);
  auto idx = [&](int x, int y, int a, int b) {
    return ((static_cast<std::size_t>(x) * s.m_b + y) * d + a) * d + b;
  };
  ComplexMatrix psi;
  if (setup.pure) {
    psi = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        setup.pure->data(), setup.dim_a, setup.dim_b);
  }
  for (int x = 0; x < s.m_a; ++x) {
    for (int y = 0; y < s.m_b; ++y) {
      for (int a = 0; a < d; ++a) {
        const auto& am = setup.alice_measurements[x][a];
        for (int b = 0; b < d; ++b) {
          const auto& bm = setup.bob_measurements[y][b];
          Complex p;
          if (setup.pure) {
            p = (psi.adjoint() * am * psi * bm.transpose()).trace();
          } else {
            p = trace_product(tensor(am, bm), *setup.density);
          }
          joint[idx(x, y, a, b)] = p.real();
        }
      }
    }
  }
  double total = 0.0;
  for (const auto& t : s.terms) {
    double prob = 0.0;
    for (int a = 0; a < d; ++a) prob += joint[idx(t.x, t.y, a, mod(static_cast<long long>(t.f_value) - a, d))];
    total += s.prior_alice[t.x] * s.prior_bob[t.y] * t.payoff * prob;
  }
  return total;
}

BellScenario chsh_scenario() {
  BellScenario s;
  s.m_a = 2;
  s.m_b = 2;
  s.d = 2;
  s.prior_alice = {0.5, 0.5};
  s.prior_bob = {0.5, 0.5};
  s.exact_prior_alice = std::vector<Rational>{Rational(1, 2), Rational(1, 2)};
  s.exact_prior_bob = s.exact_prior_alice;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) s.terms.push_back({x, y, 0, 0, 1.0, x * y});
  }
  s.classical_bound = 0.75;
  return s;
}

BellScenario cglmp_scenario(int d) {
  if (d < 2) throw std::invalid_argument("d: CGLMP needs d >= 2");
  BellScenario s;
  s.m_a = 2;
  s.m_b = 2;
  s.d = d;
  s.prior_alice = {0.5, 0.5};
  s.prior_bob = {0.5, 0.5};
  s.exact_prior_alice = std::vector<Rational>{Rational(1, 2), Rational(1, 2)};
  s.exact_prior_bob = s.exact_prior_alice;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int k = 0; k < d / 2; ++k) {
        for (int q = 0; q < 2; ++q) {
          const int sign = ((x + y + q) % 2 == 0) ? 1 : -1;
          const double pay = (q == 0 ? 1.0 : -1.0) * (1.0 - 2.0 * k / (d - 1));
          s.terms.push_back({x, y, q, k, pay, mod(-static_cast<long long>(sign) * (k + q) - x * y, d)});
        }
      }
    }
  }
  s.classical_bound = 0.5;
  return s;
}

BipartiteQuantumSetup chsh_optimal_setup() {
  ComplexMatrix z(2, 2), xm(2, 2);
  z << 1, 0, 0, -1;
  xm << 0, 1, 1, 0;
  const double r = 1.0 / std::sqrt(2.0);
  BipartiteQuantumSetup setup;
  setup.dim_a = 2;
  setup.dim_b = 2;
  setup.pure = schmidt_state({1.0, 1.0});
  for (const ComplexMatrix& o : {z, xm}) {
    setup.alice_measurements.push_back({projector_from_observable(o, 1), projector_from_observable(o, -1)});
  }
  for (const ComplexMatrix& o : {ComplexMatrix(r * (z + xm)), ComplexMatrix(r * (z - xm))}) {
    setup.bob_measurements.push_back({projector_from_observable(o, 1), projector_from_observable(o, -1)});
  }
  return setup;
}

BipartiteQuantumSetup cglmp_setup(const std::vector<double>& gamma) {
  const int d = static_cast<int>(gamma.size());
  if (d < 2) throw std::invalid_argument("schmidt: need at least 2 coefficients");
  BipartiteQuantumSetup setup;
  setup.dim_a = d;
  setup.dim_b = d;
  setup.pure = schmidt_state(gamma);
  setup.alice_measurements = cglmp_alice_measurements(d);
  setup.bob_measurements = cglmp_bob_measurements(d);
  return setup;
}

}  // namespace pnc
