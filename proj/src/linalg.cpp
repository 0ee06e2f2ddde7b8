#include "pncgames/linalg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pnc {

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& m, int dim_a, int dim_b) {
  if (dim_a <= 0 || dim_b <= 0) {
    throw std::invalid_argument("partial_trace_first: dimensions must be positive");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream msg;
    msg << "partial_trace_first: matrix is " << m.rows() << "x" << m.cols()
        << ", expected " << n << "x" << n;
    throw std::invalid_argument(msg.str());
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int a = 0; a < dim_a; ++a) {
    out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
  }
  return out;
}

double hermitian_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  const double dev = hermitian_deviation(m);
  if (!(dev <= tol::kHermitianGate)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (deviation " << dev << ")";
    throw std::invalid_argument(msg.str());
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& m) {
  return hermitian_eigenvalues(m)(0);
}

ComplexMatrix psd_project(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix outer(const ComplexVector& v) { return v * v.adjoint(); }

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(ab) = sum_ij a_ij b_ji
  return (a.array() * b.transpose().array()).sum();
}

void validate_density(const ComplexMatrix& rho, const char* what) {
  std::ostringstream msg;
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    msg << what << ": density matrix must be square and non-empty";
    throw std::invalid_argument(msg.str());
  }
  const double dev = hermitian_deviation(rho);
  if (dev > tol::kStructural) {
    msg << what << ": not Hermitian (deviation " << dev << ")";
    throw std::invalid_argument(msg.str());
  }
  const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_err > tol::kStructural) {
    msg << what << ": trace differs from 1 by " << tr_err;
    throw std::invalid_argument(msg.str());
  }
  const double lmin = min_eigenvalue(rho);
  if (lmin < -tol::kStructural) {
    msg << what << ": negative eigenvalue " << lmin;
    throw std::invalid_argument(msg.str());
  }
}

void validate_povm(std::span<const ComplexMatrix> elements, const char* what) {
  std::ostringstream msg;
  if (elements.empty()) {
    msg << what << ": POVM has no elements";
    throw std::invalid_argument(msg.str());
  }
  const Eigen::Index dim = elements.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t b = 0; b < elements.size(); ++b) {
    const auto& e = elements[b];
    if (e.rows() != dim || e.cols() != dim) {
      msg << what << ": element " << b << " has inconsistent dimension";
      throw std::invalid_argument(msg.str());
    }
    const double dev = hermitian_deviation(e);
    if (dev > tol::kStructural) {
      msg << what << ": element " << b << " not Hermitian (deviation " << dev << ")";
      throw std::invalid_argument(msg.str());
    }
    const double lmin = min_eigenvalue(e);
    if (lmin < -tol::kStructural) {
      msg << what << ": element " << b << " has negative eigenvalue " << lmin;
      throw std::invalid_argument(msg.str());
    }
    sum += e;
  }
  const double comp = max_abs_entry(sum - ComplexMatrix::Identity(dim, dim));
  if (comp > tol::kStructural) {
    msg << what << ": elements sum to identity only within " << comp;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace pnc
