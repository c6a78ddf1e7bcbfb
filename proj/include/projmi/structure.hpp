#pragma once

// Separable mixtures sum_k lambda_k sigma_Ak (x) sigma_Bk and simple
// product / PPT screens.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "projmi/error.hpp"
#include "projmi/projective.hpp"
#include "projmi/qstate.hpp"

namespace projmi {

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kProductTol = 1e-9;

class SeparableMixture {
 public:
  using Component = std::pair<DensityMatrix, DensityMatrix>;

  SeparableMixture(std::vector<double> weights, std::vector<Component> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (weights_.empty() || weights_.size() != components_.size()) {
      throw Error(ErrorKind::BadParameter, "mixture needs one weight per component and at least one component");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw Error(ErrorKind::BadParameter, "negative or NaN weight " + std::to_string(w));
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTol) {
      throw Error(ErrorKind::BadParameter, "weights sum to " + detail::format_double(total));
    }
    const int na = components_.front().first.dim();
    const int nb = components_.front().second.dim();
    for (const auto& [a, b] : components_) {
      if (a.dim() != na || b.dim() != nb) {
        throw Error(ErrorKind::DimensionMismatch, "mixture components have inconsistent dimensions");
      }
    }
    dims_ = BipartiteDims(na, nb);
  }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Component>& components() const { return components_; }
  const BipartiteDims& dims() const { return *dims_; }

 private:
  std::vector<double> weights_;
  std::vector<Component> components_;
  std::optional<BipartiteDims> dims_;
};

/// sigma = sum_k lambda_k sigma_Ak (x) sigma_Bk.
inline DensityMatrix assemble(const SeparableMixture& m) {
  const int n = m.dims().total();
  Matrix sigma = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < m.weights().size(); ++k) {
    const auto& [a, b] = m.components()[k];
    sigma += m.weights()[k] * tensor(a.matrix(), b.matrix());
  }
  return validate_density(sigma);
}

/// (p_A, p_B) -> sum_k lambda_k tr(sigma_Ak p_A) tr(sigma_Bk p_B).
class RestrictedDensity {
 public:
  explicit RestrictedDensity(SeparableMixture m) : m_(std::move(m)) {}

  double operator()(const ProjectivePoint& pa, const ProjectivePoint& pb) const {
    const auto& dims = m_.dims();
    if (pa.dim() != dims.dim_a() || pb.dim() != dims.dim_b()) {
      throw Error(ErrorKind::DimensionMismatch, "restricted density evaluated off P(H_A) x P(H_B)");
    }
    const Vector& x = pa.representative();
    const Vector& y = pb.representative();
    double total = 0.0;
    for (std::size_t k = 0; k < m_.weights().size(); ++k) {
      const auto& [a, b] = m_.components()[k];
      total += m_.weights()[k] * x.dot(a.matrix() * x).real() * y.dot(b.matrix() * y).real();
    }
    return total;
  }

 private:
  SeparableMixture m_;
};

inline RestrictedDensity restricted_density(const SeparableMixture& m) { return RestrictedDensity(m); }

/// True iff ||sigma - sigma_A (x) sigma_B||_F <= tol.
inline bool is_product(const DensityMatrix& sigma, const BipartiteDims& dims, double tol = kProductTol) {
  if (sigma.dim() != dims.total()) throw Error(ErrorKind::DimensionMismatch, "is_product dims");
  const Matrix a = partial_trace(sigma.matrix(), dims, Subsystem::A);
  const Matrix b = partial_trace(sigma.matrix(), dims, Subsystem::B);
  return frobenius_distance(sigma.matrix(), tensor(a, b)) <= tol;
}

/// Smallest eigenvalue of the partial transpose on B.
inline double partial_transpose_min_eigenvalue(const DensityMatrix& sigma, const BipartiteDims& dims) {
  if (sigma.dim() != dims.total()) throw Error(ErrorKind::DimensionMismatch, "ppt_check dims");
  return detail::hermitian_eigenvalues(partial_transpose_b(sigma.matrix(), dims)).minCoeff();
}

/// Positive-partial-transpose screen. Necessary for separability only; a
/// label, not a separability certificate in dimensions 3x3 and above.
inline bool ppt_check(const DensityMatrix& sigma, const BipartiteDims& dims) {
  return partial_transpose_min_eigenvalue(sigma, dims) >= -kValidationTol;
}

}  // namespace projmi
