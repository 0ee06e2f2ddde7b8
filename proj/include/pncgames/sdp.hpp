#pragma once

// Small primal-dual interior-point solver for the block SDPs that appear in
// the see-saw half-steps:
//
//   maximize   sum_k Re Tr(W_k X_k)
//   subject to sum_k a_{g,k} Tr(E_t X_k) = rhs   for every group g, row t in g
//              X_k >= 0 (Hermitian, all blocks the same size)
//
// Constraint groups share one coefficient per block across all their rows,
// so the Schur complement is assembled from per-block Gram matrices of the
// (few) distinct row templates E_t. HKM direction with Mehrotra
// predictor-corrector steps.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pncgames/linalg.hpp"

namespace pnc::sdp {

/// A Hermitian matrix given by its nonzero entries.
struct SparseHermitian {
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  std::vector<Entry> entries;

  /// Re Tr(E X).
  double trace_with(const ComplexMatrix& x) const;
  /// m += s E.
  void add_to(ComplexMatrix& m, double s) const;
};

/// Orthonormal Hermitian basis of n x n matrices under Tr(F_p F_q):
/// diagonal units E_jj first (index j), then for j < k the symmetric and
/// antisymmetric off-diagonal pairs.
std::vector<SparseHermitian> hermitian_basis(int n);

/// Identity as a SparseHermitian.
SparseHermitian sparse_identity(int n);

struct ConstraintGroup {
  std::vector<std::pair<int, double>> blocks;  // (block, coefficient), nonzero only
  std::vector<int> rows;                       // indices into Problem::templates
  std::vector<double> rhs;                     // one per row
};

struct Problem {
  int block_dim = 0;
  std::vector<ComplexMatrix> objective;  // W_k, one per block
  std::vector<SparseHermitian> templates;
  std::vector<ConstraintGroup> groups;

  int num_blocks() const { return static_cast<int>(objective.size()); }
  int num_constraints() const;
};

struct Options {
  double gap_tol = 1e-10;
  double feas_tol = 1e-10;
  int max_iters = 80;
};

struct Result {
  std::vector<ComplexMatrix> x;
  double primal_objective = 0.0;  // sum Re Tr(W_k X_k)
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Numerical breakdown. what() carries the per-iteration trace.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Result solve(const Problem& problem, const Options& opts = {});

}  // namespace pnc::sdp
