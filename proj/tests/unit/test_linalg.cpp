#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pncgames/linalg.hpp"

using namespace pnc;

namespace {

ComplexMatrix diag(std::initializer_list<double> v) {
  ComplexMatrix m = ComplexMatrix::Zero(v.size(), v.size());
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

ComplexMatrix sigma_x() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("tensor: identities, diagonals, sigma_x squared") {
  CHECK(max_abs_entry(tensor(identity(2), identity(2)) - identity(4)) == 0.0);
  CHECK(max_abs_entry(tensor(diag({1, 2}), diag({3, 4})) - diag({3, 4, 6, 8})) == 0.0);
  const ComplexMatrix xx = tensor(sigma_x(), sigma_x());
  CHECK(max_abs_entry(xx * xx - identity(4)) == 0.0);
}

TEST_CASE("tensor: non-square factors") {
  oracle::Rng rng(7);
  const ComplexMatrix a = oracle::random_matrix(rng, 2, 3), b = oracle::random_matrix(rng, 3, 1);
  const ComplexMatrix t = tensor(a, b);
  CHECK(t.rows() == 6);
  CHECK(t.cols() == 3);
  CHECK(oracle::max_abs_diff(t, oracle::kron(a, b)) <= 1e-15);
}

TEST_CASE("partial_trace_first examples") {
  oracle::Rng rng(1);
  const ComplexMatrix rho = oracle::random_density(rng, 3), sigma = oracle::random_density(rng, 2);
  CHECK(max_abs_entry(partial_trace_first(tensor(rho, sigma), 3, 2) - sigma) <= 1e-14);

  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_entry(partial_trace_first(outer(phi), 2, 2) - identity(2) / 2.0) <= 1e-15);
  CHECK(max_abs_entry(partial_trace_first(identity(4) / 4.0, 2, 2) - identity(2) / 2.0) == 0.0);
}

TEST_CASE("partial_trace_first rejects a dimension mismatch") {
  CHECK_THROWS_AS(partial_trace_first(identity(4), 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace_first(ComplexMatrix::Zero(4, 3), 2, 2), std::invalid_argument);
}

TEST_CASE("min_eigenvalue examples") {
  CHECK(min_eigenvalue(identity(2)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(min_eigenvalue(diag({2, -3})) == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(min_eigenvalue(sigma_x()) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("min_eigenvalue rejects non-Hermitian input") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(min_eigenvalue(m), std::invalid_argument);
  // Inside the 1e-8 gate the Hermitian part is used.
  ComplexMatrix n = identity(2);
  n(0, 1) = 1e-9;
  CHECK(min_eigenvalue(n) == doctest::Approx(1.0 - 5e-10).epsilon(1e-12));
}

TEST_CASE("psd_project examples") {
  CHECK(max_abs_entry(psd_project(diag({1, -1})) - diag({1, 0})) <= 1e-15);
  // sigma_x = |+><+| - |-><-|, so the projection is |+><+| = (I + sigma_x)/2.
  CHECK(max_abs_entry(psd_project(sigma_x()) - (identity(2) + sigma_x()) / 2.0) <= 1e-15);
  const ComplexMatrix p = psd_project(diag({0.5, -2, 0.25}));
  CHECK(max_abs_entry(psd_project(p) - p) <= 1e-15);
}

TEST_CASE("density and POVM validation") {
  CHECK_NOTHROW(validate_density(identity(3) / 3.0));
  CHECK_THROWS_AS(validate_density(identity(3) / 2.0), std::invalid_argument);
  CHECK_THROWS_AS(validate_density(diag({1.5, -0.5})), std::invalid_argument);
  std::vector<ComplexMatrix> povm{diag({1, 0}), diag({0, 1})};
  CHECK_NOTHROW(validate_povm(povm));
  povm[1] = diag({0, 0.9});
  CHECK_THROWS_AS(validate_povm(povm), std::invalid_argument);
}

TEST_CASE("trace_product matches the trace of the product") {
  oracle::Rng rng(3);
  const ComplexMatrix a = oracle::random_matrix(rng, 4, 4), b = oracle::random_matrix(rng, 4, 4);
  CHECK(std::abs(trace_product(a, b) - (a * b).trace()) <= 1e-12);
}
