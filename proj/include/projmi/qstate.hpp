#pragma once

// Complex-matrix substrate: density matrices, observables, Kronecker
// products, partial traces and spectral entropies.
//
// Bipartite index convention: joint basis index = a * dim_b + b (A-major),
// matching the Kronecker product tensor(A, B).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "projmi/error.hpp"

namespace projmi {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kValidationTol = 1e-10;
inline constexpr double kDerivedTol = 1e-9;

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific << v;
  return os.str();
}

inline void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::NotSquare,
                "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenDecompositionFailure, "self-adjoint eigensolver did not converge");
  }
  return solver.eigenvalues();
}

}  // namespace detail

enum class Subsystem { A, B };

/// Dimensions of H_A (x) H_B. Both factors must have dimension at least 3.
class BipartiteDims {
 public:
  BipartiteDims(int dim_a, int dim_b) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 3 || dim_b < 3) {
      throw Error(ErrorKind::BadParameter, "bipartite factor dimensions must be >= 3, got " +
                                               std::to_string(dim_a) + "x" + std::to_string(dim_b));
    }
  }

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  int total() const { return dim_a_ * dim_b_; }
  int dim(Subsystem s) const { return s == Subsystem::A ? dim_a_ : dim_b_; }

  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;

 private:
  int dim_a_;
  int dim_b_;
};

/// Self-adjoint operator (observable).
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    detail::require_square(m_);
    const double defect = detail::hermiticity_defect(m_);
    if (defect > kValidationTol) {
      throw Error(ErrorKind::NotHermitian, "max |A - A^dagger| = " + detail::format_double(defect));
    }
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  Matrix m_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  /// Spectrum in ascending order with the roundoff window [-1e-10, 0) clamped to 0.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  DensityMatrix(Matrix m, Eigen::VectorXd eigenvalues) : m_(std::move(m)), eigenvalues_(std::move(eigenvalues)) {}

  friend DensityMatrix validate_density(const Matrix& m, double tol);

  Matrix m_;
  Eigen::VectorXd eigenvalues_;
};

/// Checks the three density-matrix invariants and wraps the matrix.
inline DensityMatrix validate_density(const Matrix& m, double tol = kValidationTol) {
  detail::require_square(m);
  if (!m.allFinite()) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
  const double defect = detail::hermiticity_defect(m);
  if (defect > tol) {
    throw Error(ErrorKind::NotHermitian, "max |M - M^dagger| = " + detail::format_double(defect));
  }
  Eigen::VectorXd evals = detail::hermitian_eigenvalues(m);
  if (evals.minCoeff() < -tol) {
    throw Error(ErrorKind::NotPositive, "smallest eigenvalue = " + detail::format_double(evals.minCoeff()));
  }
  const double trace_defect = std::abs(m.trace() - cplx(1.0, 0.0));
  if (trace_defect > tol) {
    throw Error(ErrorKind::TraceNotOne, "|tr(M) - 1| = " + detail::format_double(trace_defect));
  }
  for (auto& v : evals) v = std::max(v, 0.0);
  // Store the exactly Hermitian part so downstream quadratic forms are real.
  Matrix herm = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(herm), std::move(evals));
}

/// Kronecker product A (x) B with block structure A_ij * B.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector tensor(const Vector& x, const Vector& y) {
  Vector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x[i] * y;
  return out;
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return validate_density(tensor(a.matrix(), b.matrix()));
}

/// Raw partial trace without validation of the input.
inline Matrix partial_trace(const Matrix& m, const BipartiteDims& dims, Subsystem keep) {
  if (m.rows() != dims.total() || m.cols() != dims.total()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix of dimension " + std::to_string(m.rows()) +
                                                  " does not match dims " + std::to_string(dims.dim_a()) +
                                                  "x" + std::to_string(dims.dim_b()));
  }
  const int na = dims.dim_a();
  const int nb = dims.dim_b();
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(na, na);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j)
        for (int b = 0; b < nb; ++b) out(i, j) += m(i * nb + b, j * nb + b);
    return out;
  }
  Matrix out = Matrix::Zero(nb, nb);
  for (int a = 0; a < na; ++a) out += m.block(a * nb, a * nb, nb, nb);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& sigma, const BipartiteDims& dims, Subsystem keep) {
  return validate_density(partial_trace(sigma.matrix(), dims, keep));
}

/// Partial transpose on subsystem B.
inline Matrix partial_transpose_b(const Matrix& m, const BipartiteDims& dims) {
  if (m.rows() != dims.total()) throw Error(ErrorKind::DimensionMismatch, "partial transpose dims");
  const int na = dims.dim_a();
  const int nb = dims.dim_b();
  Matrix out(m.rows(), m.cols());
  for (int a = 0; a < na; ++a)
    for (int ap = 0; ap < na; ++ap) out.block(a * nb, ap * nb, nb, nb) = m.block(a * nb, ap * nb, nb, nb).transpose();
  return out;
}

/// S(sigma) = -sum lambda log2 lambda, in bits, with 0 log 0 = 0.
inline double von_neumann_entropy(const DensityMatrix& sigma) {
  double s = 0.0;
  for (double lambda : sigma.eigenvalues()) {
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  }
  return std::max(s, 0.0);
}

/// I(sigma) = S(sigma_A) + S(sigma_B) - S(sigma), in bits.
inline double vn_mutual_information(const DensityMatrix& sigma, const BipartiteDims& dims) {
  const double sa = von_neumann_entropy(partial_trace(sigma, dims, Subsystem::A));
  const double sb = von_neumann_entropy(partial_trace(sigma, dims, Subsystem::B));
  return sa + sb - von_neumann_entropy(sigma);
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace projmi
