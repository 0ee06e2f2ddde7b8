#pragma once

// Dense complex-matrix primitives used throughout the library.
//
// Everything here works on Eigen::MatrixXcd. Hilbert-space dimensions in this
// project stay below a few hundred, so dense storage and full Hermitian
// eigensolves are used everywhere.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pnc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
/// Structural invariants: Hermiticity, unit trace, PSD, POVM completeness.
inline constexpr double kStructural = 1e-10;
/// Hermiticity gate applied before any eigensolve.
inline constexpr double kHermitianGate = 1e-8;
}  // namespace tol

/// Kronecker product a ⊗ b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the first tensor factor of an operator on C^dim_a ⊗ C^dim_b.
/// Throws std::invalid_argument if m is not (dim_a*dim_b)-square.
ComplexMatrix partial_trace_first(const ComplexMatrix& m, int dim_a, int dim_b);

/// Largest entrywise |m - m^†|.
double hermitian_deviation(const ComplexMatrix& m);

/// Eigenvalues (ascending) of the Hermitian part of m. Throws if m deviates
/// from Hermitian by more than tol::kHermitianGate.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& m);

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to 0.
ComplexMatrix psd_project(const ComplexMatrix& m);

/// Largest entrywise modulus.
double max_abs_entry(const ComplexMatrix& m);

/// Identity of the given size.
ComplexMatrix identity(int dim);

/// |v><v|.
ComplexMatrix outer(const ComplexVector& v);

/// Tr(a b) without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Validates a density matrix (Hermitian, unit trace, PSD at
/// tol::kStructural). Throws std::invalid_argument naming `what` otherwise.
void validate_density(const ComplexMatrix& rho, const char* what = "state");

/// Validates a POVM: every element Hermitian and PSD, elements summing to the
/// identity within tol::kStructural.
void validate_povm(std::span<const ComplexMatrix> elements,
                   const char* what = "measurement");

}  // namespace pnc
