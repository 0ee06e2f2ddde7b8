#include "pncgames/seesaw.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace pnc {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kCoeffTol = 1e-14;
constexpr double kRevalidateTol = 1e-8;
// Restarts closer than this to the incumbent count as ties; the earliest wins.
constexpr double kTieTol = 1e-12;

ComplexMatrix herm(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

void check_states(const Game& g, const std::vector<ComplexMatrix>& states) {
  if (static_cast<int>(states.size()) != g.alice_inputs) {
    throw std::invalid_argument("states: need one per Alice input");
  }
  const auto n = states.front().rows();
  for (const auto& s : states) {
    if (s.rows() != n || s.cols() != n) throw std::invalid_argument("states: inconsistent dimensions");
  }
}

void check_measurements(const Game& g, const std::vector<std::vector<ComplexMatrix>>& meas) {
  if (static_cast<int>(meas.size()) != g.bob_inputs) {
    throw std::invalid_argument("measurements: need one POVM per Bob input");
  }
  for (const auto& povm : meas) {
    if (static_cast<int>(povm.size()) != g.num_outcomes) {
      throw std::invalid_argument("measurements: need one element per outcome");
    }
  }
}

// Orthonormal basis (columns) of the span of w_c - w_ref over all cells c of
// all partitions, where w_c(x) = p_A(x)/q_c on c and 0 elsewhere. The states
// are oblivious exactly when sum_x Q(x, col) rho_x = 0 for every column.
Eigen::MatrixXd oblivious_basis(const Game& g) {
  const int nx = g.alice_inputs;
  const auto q = cell_weights(g);
  std::vector<Eigen::VectorXd> w;
  for (int j = 0; j < g.partitions.size(); ++j) {
    const auto& cells = g.partitions.partitions[j].cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(nx);
      for (int x : cells[i]) v(x) = g.prior_alice[x] / q[j][i];
      w.push_back(std::move(v));
    }
  }
  if (w.size() < 2) return Eigen::MatrixXd(nx, 0);
  Eigen::MatrixXd diff(nx, static_cast<Eigen::Index>(w.size() - 1));
  for (std::size_t c = 1; c < w.size(); ++c) diff.col(static_cast<Eigen::Index>(c - 1)) = w[c] - w[0];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  const double scale = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankTol * std::max(1.0, scale)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

// The state half-step with everything but the objective precomputed.
class StateProgram {
 public:
  StateProgram(const Game& g, int n) : g_(g), n_(n), score_(g) {
    q_ = oblivious_basis(g);
    auto basis = sdp::hermitian_basis(n);
    prob_.block_dim = n;
    prob_.templates = basis;
    const int id = static_cast<int>(prob_.templates.size());
    prob_.templates.push_back(sdp::sparse_identity(n));
    for (int x = 0; x < g.alice_inputs; ++x) prob_.groups.push_back({{{x, 1.0}}, {id}, {1.0}});
    // The last diagonal unit is implied by the trace rows since every column
    // of Q is orthogonal to the all-ones vector.
    std::vector<int> rows;
    for (int t = 0; t < n * n; ++t) {
      if (t != n - 1) rows.push_back(t);
    }
    for (Eigen::Index c = 0; c < q_.cols(); ++c) {
      sdp::ConstraintGroup grp;
      for (int x = 0; x < g.alice_inputs; ++x) {
        if (std::abs(q_(x, c)) > kCoeffTol) grp.blocks.push_back({x, q_(x, c)});
      }
      grp.rows = rows;
      grp.rhs.assign(rows.size(), 0.0);
      prob_.groups.push_back(std::move(grp));
    }
  }

  std::vector<ComplexMatrix> repair(std::vector<ComplexMatrix> states) const {
    const int nx = g_.alice_inputs;
    for (auto& s : states) {
      s = herm(s);
      const Complex tr = s.trace();
      s += ((1.0 - tr.real()) / n_) * identity(n_);
    }
    if (q_.cols() > 0) {
      const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(nx, nx) - q_ * q_.transpose();
      std::vector<ComplexMatrix> out(nx, ComplexMatrix::Zero(n_, n_));
      for (int x = 0; x < nx; ++x) {
        for (int xp = 0; xp < nx; ++xp) {
          if (p(x, xp) != 0.0) out[x] += p(x, xp) * states[xp];
        }
        out[x] = herm(out[x]);
      }
      states = std::move(out);
    }
    double t = 0.0;
    for (const auto& s : states) {
      const double lmin = min_eigenvalue(s);
      if (lmin < 0.0) t = std::max(t, -lmin / (1.0 / n_ - lmin));
    }
    if (t > 0.0) {
      const ComplexMatrix mixed = identity(n_) / static_cast<double>(n_);
      for (auto& s : states) s = (1.0 - t) * s + t * mixed;
    }
    return states;
  }

  StateStep solve(const std::vector<std::vector<ComplexMatrix>>& meas, const std::vector<ComplexMatrix>* incumbent,
                  const sdp::Options& opts) {
    prob_.objective.assign(g_.alice_inputs, ComplexMatrix::Zero(n_, n_));
    for (int x = 0; x < g_.alice_inputs; ++x) {
      for (int y = 0; y < g_.bob_inputs; ++y) {
        for (int b = 0; b < g_.num_outcomes; ++b) {
          const double s = score_(x, y, b);
          if (s != 0.0) prob_.objective[x] += s * meas[y][b];
        }
      }
    }
    auto res = sdp::solve(prob_, opts);
    StateStep out{repair(std::move(res.x)), 0.0};
    out.objective = seesaw_objective(g_, out.states, meas);
    if (incumbent) {
      const double old = seesaw_objective(g_, *incumbent, meas);
      if (old >= out.objective) return {*incumbent, old};
    }
    return out;
  }

 private:
  const Game& g_;
  int n_;
  ScoreTable score_;
  Eigen::MatrixXd q_;
  sdp::Problem prob_;
};

class MeasurementProgram {
 public:
  MeasurementProgram(const Game& g, int n) : g_(g), n_(n), score_(g) {
    prob_.block_dim = n;
    prob_.templates = sdp::hermitian_basis(n);
    sdp::ConstraintGroup grp;
    for (int b = 0; b < g.num_outcomes; ++b) grp.blocks.push_back({b, 1.0});
    for (int t = 0; t < n * n; ++t) {
      grp.rows.push_back(t);
      grp.rhs.push_back(t < n ? 1.0 : 0.0);
    }
    prob_.groups.push_back(std::move(grp));
  }

  MeasurementStep solve(const std::vector<ComplexMatrix>& states,
                        const std::vector<std::vector<ComplexMatrix>>* incumbent, const sdp::Options& opts) {
    MeasurementStep out;
    out.measurements.resize(g_.bob_inputs);
    for (int y = 0; y < g_.bob_inputs; ++y) {
      prob_.objective.assign(g_.num_outcomes, ComplexMatrix::Zero(n_, n_));
      for (int b = 0; b < g_.num_outcomes; ++b) {
        for (int x = 0; x < g_.alice_inputs; ++x) {
          const double s = score_(x, y, b);
          if (s != 0.0) prob_.objective[b] += s * states[x];
        }
      }
      out.measurements[y] = repair_povm(sdp::solve(prob_, opts).x);
    }
    out.objective = seesaw_objective(g_, states, out.measurements);
    if (incumbent) {
      const double old = seesaw_objective(g_, states, *incumbent);
      if (old >= out.objective) return {*incumbent, old};
    }
    return out;
  }

 private:
  const Game& g_;
  int n_;
  ScoreTable score_;
  sdp::Problem prob_;
};

ComplexMatrix gaussian_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  }
  return m;
}

std::vector<std::vector<ComplexMatrix>> random_measurements(const Game& g, int n, std::mt19937_64& rng) {
  std::vector<std::vector<ComplexMatrix>> out(g.bob_inputs);
  const int k = g.num_outcomes;
  for (int y = 0; y < g.bob_inputs; ++y) {
    Eigen::HouseholderQR<ComplexMatrix> qr(gaussian_matrix(n, rng));
    const ComplexMatrix u = qr.householderQ();
    out[y].assign(k, ComplexMatrix::Zero(n, n));
    for (int i = 0; i < n; ++i) out[y][i % k] += outer(u.col(i));
    for (auto& e : out[y]) e = herm(e);
  }
  return out;
}

std::vector<ComplexMatrix> random_states(const Game& g, int n, std::mt19937_64& rng) {
  std::vector<ComplexMatrix> out;
  out.reserve(g.alice_inputs);
  for (int x = 0; x < g.alice_inputs; ++x) {
    const ComplexMatrix m = gaussian_matrix(n, rng);
    ComplexMatrix w = herm(m * m.adjoint());
    out.push_back(w / w.trace().real());
  }
  return out;
}

}  // namespace

double seesaw_objective(const Game& g, const std::vector<ComplexMatrix>& states,
                        const std::vector<std::vector<ComplexMatrix>>& measurements) {
  check_states(g, states);
  check_measurements(g, measurements);
  const ScoreTable score(g);
  double total = 0.0;
  for (int x = 0; x < g.alice_inputs; ++x) {
    for (int y = 0; y < g.bob_inputs; ++y) {
      for (int b = 0; b < g.num_outcomes; ++b) {
        const double s = score(x, y, b);
        if (s != 0.0) total += s * trace_product(states[x], measurements[y][b]).real();
      }
    }
  }
  return total;
}

std::vector<ComplexMatrix> repair_states(const Game& g, std::vector<ComplexMatrix> states) {
  check_states(g, states);
  StateProgram prog(g, static_cast<int>(states.front().rows()));
  return prog.repair(std::move(states));
}

std::vector<ComplexMatrix> repair_povm(std::vector<ComplexMatrix> povm) {
  if (povm.empty()) throw std::invalid_argument("povm: no elements");
  const auto n = povm.front().rows();
  const double k = static_cast<double>(povm.size());
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (auto& e : povm) {
    e = herm(e);
    sum += e;
  }
  const ComplexMatrix shift = (sum - ComplexMatrix::Identity(n, n)) / k;
  double t = 0.0;
  for (auto& e : povm) {
    e -= shift;
    const double lmin = min_eigenvalue(e);
    if (lmin < 0.0) t = std::max(t, -lmin / (1.0 / k - lmin));
  }
  if (t > 0.0) {
    const ComplexMatrix share = ComplexMatrix::Identity(n, n) / k;
    for (auto& e : povm) e = (1.0 - t) * e + t * share;
  }
  return povm;
}

MeasurementStep optimize_measurements(const Game& g, const std::vector<ComplexMatrix>& states,
                                      const std::vector<std::vector<ComplexMatrix>>* incumbent,
                                      const sdp::Options& opts) {
  check_states(g, states);
  if (incumbent) check_measurements(g, *incumbent);
  MeasurementProgram prog(g, static_cast<int>(states.front().rows()));
  return prog.solve(states, incumbent, opts);
}

StateStep optimize_states(const Game& g, const std::vector<std::vector<ComplexMatrix>>& measurements,
                          const std::vector<ComplexMatrix>* incumbent, const sdp::Options& opts) {
  check_measurements(g, measurements);
  if (incumbent) check_states(g, *incumbent);
  StateProgram prog(g, static_cast<int>(measurements.front().front().rows()));
  return prog.solve(measurements, incumbent, opts);
}

SeesawResult seesaw(const Game& g, const SeesawConfig& cfg) {
  g.validate();
  if (cfg.dim < 1) throw std::invalid_argument("dim: must be at least 1");
  if (cfg.restarts < 1) throw std::invalid_argument("restarts: must be at least 1");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters: must be at least 1");
  if (cfg.initial) {
    if (cfg.initial->dim != cfg.dim) throw std::invalid_argument("initial: dimension differs from dim");
    check_states(g, cfg.initial->states);
    check_measurements(g, cfg.initial->measurements);
  }

  StateProgram states_prog(g, cfg.dim);
  MeasurementProgram meas_prog(g, cfg.dim);

  SeesawResult result;
  bool have_best = false;
  std::string last_error;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);

    SeesawRestart info;
    info.restart = r;
    std::vector<SeesawTracePoint> trace;
    std::vector<ComplexMatrix> states;
    std::vector<std::vector<ComplexMatrix>> meas;
    if (r == 0 && cfg.initial) {
      states = states_prog.repair(cfg.initial->states);
      meas.reserve(cfg.initial->measurements.size());
      for (const auto& povm : cfg.initial->measurements) meas.push_back(repair_povm(povm));
    } else {
      states = states_prog.repair(random_states(g, cfg.dim, rng));
      meas = random_measurements(g, cfg.dim, rng);
    }

    double obj = seesaw_objective(g, states, meas);
    trace.push_back({0, obj});
    try {
      for (int it = 1; it <= cfg.max_iters; ++it) {
        const double prev = obj;
        auto ss = states_prog.solve(meas, &states, cfg.sdp);
        states = std::move(ss.states);
        trace.push_back({2 * it - 1, ss.objective});
        auto ms = meas_prog.solve(states, &meas, cfg.sdp);
        meas = std::move(ms.measurements);
        obj = ms.objective;
        trace.push_back({2 * it, obj});
        info.iterations = it;
        if (obj - prev < cfg.eps) break;
      }
    } catch (const sdp::SolverError& e) {
      info.valid = false;
      info.error = e.what();
      last_error = info.error;
    }

    QuantumStrategy qs{cfg.dim, std::move(states), std::move(meas)};
    double dev = 0.0;
    if (info.valid) {
      try {
        qs.validate();
        const auto rep = check_quantum_obliviousness(g, qs, kRevalidateTol);
        dev = rep.max_deviation;
        if (!rep.passed) throw std::invalid_argument("obliviousness deviation " + std::to_string(dev));
        info.value = quantum_performance(g, qs);
      } catch (const std::invalid_argument& e) {
        info.valid = false;
        info.error = std::string("re-validation failed: ") + e.what();
        last_error = info.error;
      }
    }
    if (info.valid && (!have_best || info.value > result.value + kTieTol)) {
      have_best = true;
      result.value = info.value;
      result.strategy = std::move(qs);
      result.trace = std::move(trace);
      result.best_restart = r;
      result.obliviousness_deviation = dev;
    }
    result.restarts.push_back(std::move(info));
  }
  if (!have_best) throw std::runtime_error("seesaw: every restart failed; last error: " + last_error);
  return result;
}

QuantumStrategy embed_classical(const Game& g, const ClassicalStrategy& s) {
  if (static_cast<int>(s.encoding.size()) != g.alice_inputs || s.decoding.rows() != s.alphabet_size ||
      s.decoding.cols() != g.bob_inputs) {
    throw std::invalid_argument("strategy: shape does not match the game");
  }
  const int n = s.alphabet_size;
  QuantumStrategy qs;
  qs.dim = n;
  for (int m : s.encoding) {
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    rho(m, m) = 1.0;
    qs.states.push_back(std::move(rho));
  }
  qs.measurements.assign(g.bob_inputs, std::vector<ComplexMatrix>(g.num_outcomes, ComplexMatrix::Zero(n, n)));
  for (int y = 0; y < g.bob_inputs; ++y) {
    for (int m = 0; m < n; ++m) qs.measurements[y][s.decoding(m, y)](m, m) = 1.0;
  }
  return qs;
}

std::string seesaw_trace_csv(const std::vector<SeesawTracePoint>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "step,objective\n";
  for (const auto& p : trace) out << p.step << "," << p.objective << "\n";
  return out.str();
}

}  // namespace pnc
