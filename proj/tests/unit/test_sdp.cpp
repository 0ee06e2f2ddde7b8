#include <doctest.h>

#include "oracles.hpp"
#include "pncgames/sdp.hpp"

using namespace pnc;

TEST_CASE("hermitian_basis is orthonormal") {
  for (int n = 1; n <= 4; ++n) {
    const auto basis = sdp::hermitian_basis(n);
    REQUIRE(static_cast<int>(basis.size()) == n * n);
    std::vector<ComplexMatrix> dense;
    for (const auto& e : basis) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      e.add_to(m, 1.0);
      CHECK(hermitian_deviation(m) == 0.0);
      dense.push_back(m);
    }
    for (int p = 0; p < n * n; ++p)
      for (int q = 0; q < n * n; ++q)
        CHECK(std::abs((dense[p] * dense[q]).trace().real() - (p == q ? 1.0 : 0.0)) <= 1e-15);
  }
}

TEST_CASE("max Tr(W X) over density matrices is the top eigenvalue") {
  oracle::Rng rng(2);
  for (int n = 1; n <= 5; ++n) {
    sdp::Problem p;
    p.block_dim = n;
    p.objective = {oracle::random_hermitian(rng, n)};
    p.templates = {sdp::sparse_identity(n)};
    p.groups = {{{{0, 1.0}}, {0}, {1.0}}};
    const auto r = sdp::solve(p);
    CHECK(r.converged);
    const double top = hermitian_eigenvalues(p.objective[0]).maxCoeff();
    CHECK(std::abs(r.primal_objective - top) <= 1e-8);
    CHECK(std::abs(r.dual_objective - top) <= 1e-8);
    CHECK(min_eigenvalue(r.x[0]) >= -1e-12);
  }
}

TEST_CASE("two blocks sharing one trace budget") {
  // max Tr(W1 X1) + Tr(W2 X2) with Tr X1 + Tr X2 = 1: the larger top eigenvalue.
  oracle::Rng rng(3);
  sdp::Problem p;
  p.block_dim = 3;
  p.objective = {oracle::random_hermitian(rng, 3), oracle::random_hermitian(rng, 3)};
  p.templates = {sdp::sparse_identity(3)};
  p.groups = {{{{0, 1.0}, {1, 1.0}}, {0}, {1.0}}};
  const auto r = sdp::solve(p);
  const double want = std::max(hermitian_eigenvalues(p.objective[0]).maxCoeff(),
                               hermitian_eigenvalues(p.objective[1]).maxCoeff());
  CHECK(std::abs(r.primal_objective - want) <= 1e-8);
  CHECK(r.primal_infeasibility <= 1e-9);
}
