#include "pncgames/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pnc::sdp {

double SparseHermitian::trace_with(const ComplexMatrix& x) const {
  double s = 0.0;
  for (const auto& e : entries) s += (e.value * x(e.col, e.row)).real();
  return s;
}

void SparseHermitian::add_to(ComplexMatrix& m, double s) const {
  for (const auto& e : entries) m(e.row, e.col) += s * e.value;
}

std::vector<SparseHermitian> hermitian_basis(int n) {
  std::vector<SparseHermitian> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) out.push_back({{{j, j, Complex(1.0, 0.0)}}});
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      out.push_back({{{j, k, Complex(r, 0.0)}, {k, j, Complex(r, 0.0)}}});
      out.push_back({{{j, k, Complex(0.0, r)}, {k, j, Complex(0.0, -r)}}});
    }
  }
  return out;
}

SparseHermitian sparse_identity(int n) {
  SparseHermitian id;
  for (int j = 0; j < n; ++j) id.entries.push_back({j, j, Complex(1.0, 0.0)});
  return id;
}

int Problem::num_constraints() const {
  int m = 0;
  for (const auto& g : groups) m += static_cast<int>(g.rows.size());
  return m;
}

namespace {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

ComplexMatrix herm(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Largest alpha with x + alpha dx still positive semidefinite (infinity if
// every direction is fine).
double max_step(const ComplexMatrix& x, const ComplexMatrix& dx) {
  Eigen::LLT<ComplexMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const ComplexMatrix linv = llt.matrixL().solve(ComplexMatrix::Identity(x.rows(), x.cols()));
  const ComplexMatrix w = herm(linv * dx * linv.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class Solver {
 public:
  Solver(const Problem& p, const Options& o) : p_(p), o_(o) {
    n_ = p.block_dim;
    nb_ = p.num_blocks();
    offsets_.reserve(p.groups.size());
    m_ = 0;
    for (const auto& g : p.groups) {
      offsets_.push_back(m_);
      m_ += static_cast<int>(g.rows.size());
    }
    b_ = RealVector(m_);
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      for (std::size_t l = 0; l < p.groups[g].rows.size(); ++l) b_(offsets_[g] + l) = p.groups[g].rhs[l];
    }
    touching_.resize(nb_);
    local_.resize(nb_);
    local_index_.assign(nb_, std::vector<int>(p.templates.size(), -1));
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      for (const auto& [k, a] : p.groups[g].blocks) {
        touching_[k].push_back({static_cast<int>(g), a});
        for (int t : p.groups[g].rows) {
          if (local_index_[k][t] < 0) {
            local_index_[k][t] = static_cast<int>(local_[k].size());
            local_[k].push_back(t);
          }
        }
      }
    }
    c_.reserve(nb_);
    for (const auto& w : p.objective) c_.push_back(-herm(w));
  }

  Result run() {
    double bmax = b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0;
    double cmax = 0.0;
    for (const auto& c : c_) cmax = std::max(cmax, c.norm());
    const double xi = std::max(10.0, std::sqrt(static_cast<double>(n_)) * bmax);
    const double eta = std::max(10.0, std::sqrt(static_cast<double>(n_)) * (1.0 + cmax));
    const double bnorm = 1.0 + b_.norm();
    double cnorm = 1.0;
    for (const auto& c : c_) cnorm += c.squaredNorm();
    cnorm = std::sqrt(cnorm);

    std::vector<ComplexMatrix> x(nb_, xi * identity(n_));
    std::vector<ComplexMatrix> z(nb_, eta * identity(n_));
    RealVector y = RealVector::Zero(m_);

    Result res;
    std::ostringstream trace;
    double last_gap = std::numeric_limits<double>::infinity();
    double last_pinf = last_gap;
    double last_dinf = last_gap;

    auto finish = [&](bool converged, int it) {
      res.x = x;
      res.primal_objective = 0.0;
      for (int k = 0; k < nb_; ++k) res.primal_objective -= trace_product(c_[k], x[k]).real();
      res.dual_objective = -b_.dot(y);
      res.primal_infeasibility = last_pinf;
      res.iterations = it;
      res.converged = converged;
      return res;
    };

    for (int it = 0; it <= o_.max_iters; ++it) {
      const RealVector rp = b_ - apply_a(x);
      std::vector<ComplexMatrix> rd(nb_);
      double dinf2 = 0.0;
      double pobj = 0.0;
      double mu = 0.0;
      for (int k = 0; k < nb_; ++k) {
        rd[k] = c_[k] - z[k];
        pobj += trace_product(c_[k], x[k]).real();
        mu += trace_product(x[k], z[k]).real();
      }
      apply_at(y, rd, -1.0);
      for (int k = 0; k < nb_; ++k) dinf2 += rd[k].squaredNorm();
      mu /= static_cast<double>(nb_ * n_);
      const double dobj = b_.dot(y);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double pinf = rp.norm() / bnorm;
      const double dinf = std::sqrt(dinf2) / cnorm;
      trace << "it=" << it << " pobj=" << -pobj << " dobj=" << -dobj << " gap=" << gap
            << " pinf=" << pinf << " dinf=" << dinf << " mu=" << mu << "\n";
      if (!std::isfinite(gap) || !std::isfinite(pinf) || !std::isfinite(dinf)) {
        return breakdown(trace, "non-finite iterate", last_gap, last_pinf, last_dinf, finish, it);
      }
      last_gap = gap;
      last_pinf = pinf;
      last_dinf = dinf;
      if (gap < o_.gap_tol && pinf < o_.feas_tol && dinf < o_.feas_tol) return finish(true, it);
      if (it == o_.max_iters) break;

      std::vector<ComplexMatrix> zinv(nb_);
      for (int k = 0; k < nb_; ++k) {
        Eigen::LLT<ComplexMatrix> llt(z[k]);
        if (llt.info() != Eigen::Success) {
          return breakdown(trace, "Z lost definiteness", gap, pinf, dinf, finish, it);
        }
        zinv[k] = llt.solve(identity(n_));
      }
      const RealMatrix m = schur(x, zinv);
      Eigen::LLT<RealMatrix> mfac(m);
      if (mfac.info() != Eigen::Success) {
        return breakdown(trace, "Schur complement not positive definite", gap, pinf, dinf, finish, it);
      }

      // Predictor.
      std::vector<ComplexMatrix> dx, dz;
      RealVector dy;
      direction(x, zinv, rd, rp, mfac, 0.0, nullptr, nullptr, dx, dy, dz);
      double ap = 1.0, ad = 1.0;
      for (int k = 0; k < nb_; ++k) {
        ap = std::min(ap, max_step(x[k], dx[k]));
        ad = std::min(ad, max_step(z[k], dz[k]));
      }
      double mu_aff = 0.0;
      for (int k = 0; k < nb_; ++k) {
        mu_aff += trace_product(x[k] + ap * dx[k], z[k] + ad * dz[k]).real();
      }
      mu_aff /= static_cast<double>(nb_ * n_);
      const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      const double gamma = 0.9 + 0.09 * std::min(ap, ad);

      // Corrector.
      std::vector<ComplexMatrix> dx2, dz2;
      RealVector dy2;
      direction(x, zinv, rd, rp, mfac, sigma * mu, &dx, &dz, dx2, dy2, dz2);
      ap = 1.0;
      ad = 1.0;
      for (int k = 0; k < nb_; ++k) {
        ap = std::min(ap, gamma * max_step(x[k], dx2[k]));
        ad = std::min(ad, gamma * max_step(z[k], dz2[k]));
      }
      for (int k = 0; k < nb_; ++k) {
        x[k] = herm(x[k] + ap * dx2[k]);
        z[k] = herm(z[k] + ad * dz2[k]);
      }
      y += ad * dy2;
    }
    return finish(false, o_.max_iters);
  }

 private:
  template <class Finish>
  Result breakdown(const std::ostringstream& trace, const char* why, double gap, double pinf, double dinf,
                   Finish& finish, int it) {
    // Close enough to optimal that the stall is just conditioning.
    if (gap < 1e-7 && pinf < 1e-7 && dinf < 1e-7) return finish(false, it);
    throw SolverError(std::string("sdp: ") + why + "\n" + trace.str());
  }

  RealVector apply_a(const std::vector<ComplexMatrix>& x) const {
    RealVector out = RealVector::Zero(m_);
    for (std::size_t g = 0; g < p_.groups.size(); ++g) {
      const auto& grp = p_.groups[g];
      for (const auto& [k, a] : grp.blocks) {
        for (std::size_t l = 0; l < grp.rows.size(); ++l) {
          out(offsets_[g] + l) += a * p_.templates[grp.rows[l]].trace_with(x[k]);
        }
      }
    }
    return out;
  }

  // out_k += s * A^T(v)_k
  void apply_at(const RealVector& v, std::vector<ComplexMatrix>& out, double s) const {
    for (std::size_t g = 0; g < p_.groups.size(); ++g) {
      const auto& grp = p_.groups[g];
      for (const auto& [k, a] : grp.blocks) {
        for (std::size_t l = 0; l < grp.rows.size(); ++l) {
          p_.templates[grp.rows[l]].add_to(out[k], s * a * v(offsets_[g] + l));
        }
      }
    }
  }

  RealMatrix schur(const std::vector<ComplexMatrix>& x, const std::vector<ComplexMatrix>& zinv) const {
    RealMatrix m = RealMatrix::Zero(m_, m_);
    for (int k = 0; k < nb_; ++k) {
      const auto& loc = local_[k];
      const int nt = static_cast<int>(loc.size());
      RealMatrix s(nt, nt);
      for (int i = 0; i < nt; ++i) {
        const auto& ei = p_.templates[loc[i]].entries;
        for (int j = i; j < nt; ++j) {
          const auto& ej = p_.templates[loc[j]].entries;
          Complex acc(0.0, 0.0);
          for (const auto& e1 : ei) {
            for (const auto& e2 : ej) acc += e1.value * e2.value * x[k](e1.col, e2.row) * zinv[k](e2.col, e1.row);
          }
          s(i, j) = acc.real();
          s(j, i) = acc.real();
        }
      }
      for (const auto& [g1, a1] : touching_[k]) {
        const auto& r1 = p_.groups[g1].rows;
        for (const auto& [g2, a2] : touching_[k]) {
          const auto& r2 = p_.groups[g2].rows;
          const double aa = a1 * a2;
          for (std::size_t l1 = 0; l1 < r1.size(); ++l1) {
            const int i = local_index_[k][r1[l1]];
            for (std::size_t l2 = 0; l2 < r2.size(); ++l2) {
              m(offsets_[g1] + l1, offsets_[g2] + l2) += aa * s(i, local_index_[k][r2[l2]]);
            }
          }
        }
      }
    }
    return m;
  }

  // Solves for the HKM direction targeting X Z = target I, with an optional
  // second-order term dx_aff dz_aff.
  void direction(const std::vector<ComplexMatrix>& x, const std::vector<ComplexMatrix>& zinv,
                 const std::vector<ComplexMatrix>& rd, const RealVector& rp, const Eigen::LLT<RealMatrix>& mfac,
                 double target, const std::vector<ComplexMatrix>* dx_aff,
                 const std::vector<ComplexMatrix>* dz_aff, std::vector<ComplexMatrix>& dx, RealVector& dy,
                 std::vector<ComplexMatrix>& dz) const {
    std::vector<ComplexMatrix> h(nb_);
    for (int k = 0; k < nb_; ++k) {
      ComplexMatrix lead = target * identity(n_);
      if (dx_aff) lead -= (*dx_aff)[k] * (*dz_aff)[k];
      h[k] = lead * zinv[k] - x[k] - x[k] * rd[k] * zinv[k];
    }
    dy = mfac.solve(rp - apply_a(h));
    dz = rd;
    apply_at(dy, dz, -1.0);
    dx.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      ComplexMatrix lead = target * identity(n_);
      if (dx_aff) lead -= (*dx_aff)[k] * (*dz_aff)[k];
      dx[k] = herm(lead * zinv[k] - x[k] - x[k] * dz[k] * zinv[k]);
      dz[k] = herm(dz[k]);
    }
  }

  const Problem& p_;
  const Options& o_;
  int n_ = 0;
  int nb_ = 0;
  int m_ = 0;
  std::vector<int> offsets_;
  RealVector b_;
  std::vector<ComplexMatrix> c_;
  std::vector<std::vector<std::pair<int, double>>> touching_;
  std::vector<std::vector<int>> local_;
  std::vector<std::vector<int>> local_index_;
};

}  // namespace

Result solve(const Problem& problem, const Options& opts) {
  const int n = problem.block_dim;
  if (n < 1) throw std::invalid_argument("sdp: block_dim must be positive");
  for (const auto& w : problem.objective) {
    if (w.rows() != n || w.cols() != n) throw std::invalid_argument("sdp: objective block has wrong size");
  }
  for (const auto& g : problem.groups) {
    if (g.rows.size() != g.rhs.size()) throw std::invalid_argument("sdp: rows and rhs differ in length");
    for (const auto& [k, a] : g.blocks) {
      if (k < 0 || k >= problem.num_blocks()) throw std::invalid_argument("sdp: block index out of range");
    }
    for (int t : g.rows) {
      if (t < 0 || t >= static_cast<int>(problem.templates.size())) {
        throw std::invalid_argument("sdp: template index out of range");
      }
    }
  }
  Solver s(problem, opts);
  return s.run();
}

}  // namespace pnc::sdp
