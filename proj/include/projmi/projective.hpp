#pragma once

// The quantum phase space CP^{n-1}: rays, Liouville densities, observable
// functions, frames, the Kahler structure (omega, g, j), the Segre map and
// Schrodinger flow.
//
// The Kahler scale is fixed at kappa = n + 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "projmi/error.hpp"
#include "projmi/qstate.hpp"

namespace projmi {

inline constexpr double kZeroVectorTol = 1e-12;

/// A ray in C^n, stored as a unit representative. Equality ignores global phase.
class ProjectivePoint {
 public:
  int dim() const { return static_cast<int>(rep_.size()); }
  const Vector& representative() const { return rep_; }

  /// Rank-1 projector |x><x|.
  Matrix projector() const { return rep_ * rep_.adjoint(); }

  /// tr(p q) = |<x|y>|^2.
  double overlap(const ProjectivePoint& other) const {
    require_same_dim(other);
    return std::norm(rep_.dot(other.rep_));
  }

  friend bool operator==(const ProjectivePoint& p, const ProjectivePoint& q) {
    return p.dim() == q.dim() && std::abs(std::abs(p.rep_.dot(q.rep_)) - 1.0) <= kValidationTol;
  }

  friend ProjectivePoint project(const Vector& x);

 private:
  explicit ProjectivePoint(Vector rep) : rep_(std::move(rep)) {}

  void require_same_dim(const ProjectivePoint& other) const {
    if (other.dim() != dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "points live in dimensions " + std::to_string(dim()) + " and " + std::to_string(other.dim()));
    }
  }

  Vector rep_;
};

/// Canonical projection C^n \ {0} -> CP^{n-1}.
inline ProjectivePoint project(const Vector& x) {
  const double norm = x.norm();
  if (!(norm > kZeroVectorTol)) throw Error(ErrorKind::ZeroVector, "cannot project a vector of norm " + std::to_string(norm));
  return ProjectivePoint(x / norm);
}

/// Fubini-Study geodesic distance arccos sqrt(tr(pq)), in [0, pi/2].
inline double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  const double overlap = std::clamp(p.overlap(q), 0.0, 1.0);
  return std::acos(std::sqrt(overlap));
}

/// p -> tr(sigma p).
class LiouvilleDensity {
 public:
  explicit LiouvilleDensity(DensityMatrix sigma) : sigma_(std::move(sigma)) {}

  const DensityMatrix& source() const { return sigma_; }
  int dim() const { return sigma_.dim(); }

  double operator()(const ProjectivePoint& p) const {
    if (p.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "Liouville density evaluated off its space");
    return quadratic_form(p.representative());
  }

  /// <x|sigma|x> for an arbitrary (not necessarily unit) vector.
  double quadratic_form(const Vector& x) const { return x.dot(sigma_.matrix() * x).real(); }

 private:
  DensityMatrix sigma_;
};

inline LiouvilleDensity liouville_density(const DensityMatrix& sigma) { return LiouvilleDensity(sigma); }

/// f_A(p) = (n + 1) tr(A p) - tr(A).
class ObservableFunction {
 public:
  explicit ObservableFunction(HermitianOperator a) : a_(std::move(a)), trace_(a_.trace()) {}

  int dim() const { return a_.dim(); }
  const HermitianOperator& op() const { return a_; }

  double operator()(const ProjectivePoint& p) const {
    if (p.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "observable function evaluated off its space");
    const Vector& x = p.representative();
    return (dim() + 1) * x.dot(a_.matrix() * x).real() - trace_;
  }

 private:
  HermitianOperator a_;
  double trace_;
};

inline ObservableFunction observable_function(const HermitianOperator& a) { return ObservableFunction(a); }

/// n mutually orthogonal rays: the image of an orthonormal basis.
class Frame {
 public:
  explicit Frame(std::vector<ProjectivePoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorKind::InvalidFrame, "empty frame");
    const int n = points_.front().dim();
    if (static_cast<int>(points_.size()) != n) {
      throw Error(ErrorKind::InvalidFrame,
                  "a frame in dimension " + std::to_string(n) + " needs exactly " + std::to_string(n) + " points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].dim() != n) throw Error(ErrorKind::InvalidFrame, "frame points have mixed dimensions");
      for (std::size_t j = 0; j < i; ++j) {
        const double ov = points_[i].overlap(points_[j]);
        if (ov > kValidationTol) {
          throw Error(ErrorKind::InvalidFrame, "tr(p_i p_j) = " + detail::format_double(ov) + " for i != j");
        }
      }
    }
  }

  /// Columns of a unitary matrix.
  static Frame from_unitary(const Matrix& u) {
    std::vector<ProjectivePoint> pts;
    pts.reserve(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index j = 0; j < u.cols(); ++j) pts.push_back(project(u.col(j)));
    return Frame(std::move(pts));
  }

  static Frame computational(int n) { return from_unitary(Matrix::Identity(n, n)); }

  int dim() const { return points_.front().dim(); }
  const std::vector<ProjectivePoint>& points() const { return points_; }

 private:
  std::vector<ProjectivePoint> points_;
};

/// sum_i f(p_i) over a frame.
template <class F>
auto frame_sum(const F& f, const Frame& frame) {
  using Result = decltype(f(frame.points().front()));
  Result total{};
  for (const auto& p : frame.points()) total += f(p);
  return total;
}

/// Tangent vector v = -i[A_v, p] at p, stored through its (non-unique)
/// Hermitian generator A_v.
class TangentVector {
 public:
  TangentVector(ProjectivePoint base, HermitianOperator generator)
      : base_(std::move(base)), generator_(std::move(generator)) {
    if (generator_.dim() != base_.dim()) throw Error(ErrorKind::DimensionMismatch, "generator/base dimension");
  }

  const ProjectivePoint& base() const { return base_; }
  const HermitianOperator& generator() const { return generator_; }

  /// The realized tangent matrix -i[A_v, p]; Hermitian and traceless.
  Matrix realized() const {
    const Matrix p = base_.projector();
    const Matrix& a = generator_.matrix();
    return cplx(0.0, -1.0) * (a * p - p * a);
  }

 private:
  ProjectivePoint base_;
  HermitianOperator generator_;
};

namespace detail {

inline void require_common_base(const ProjectivePoint& p, const TangentVector& u) {
  if (!(u.base() == p)) throw Error(ErrorKind::BaseMismatch, "tangent vector is not based at the given point");
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double kahler_scale(const ProjectivePoint& p) { return p.dim() + 1.0; }

}  // namespace detail

/// omega_p(u, v) = -i kappa tr([A_u, A_v] p).
inline double symplectic_form(const ProjectivePoint& p, const TangentVector& u, const TangentVector& v) {
  detail::require_common_base(p, u);
  detail::require_common_base(p, v);
  const Matrix c = detail::commutator(u.generator().matrix(), v.generator().matrix());
  const cplx value = cplx(0.0, -detail::kahler_scale(p)) * (c * p.projector()).trace();
  return value.real();
}

/// g_p(u, v) = -kappa tr(p([A_u,p][A_v,p] + [A_v,p][A_u,p])).
inline double fs_metric(const ProjectivePoint& p, const TangentVector& u, const TangentVector& v) {
  detail::require_common_base(p, u);
  detail::require_common_base(p, v);
  const Matrix proj = p.projector();
  const Matrix cu = detail::commutator(u.generator().matrix(), proj);
  const Matrix cv = detail::commutator(v.generator().matrix(), proj);
  return -detail::kahler_scale(p) * (proj * (cu * cv + cv * cu)).trace().real();
}

/// j_p(v) = i[v, p]. The result is returned with generator -v, since
/// -i[-v, p] = i[v, p].
inline TangentVector complex_structure(const ProjectivePoint& p, const TangentVector& v) {
  detail::require_common_base(p, v);
  const Matrix realized = v.realized();
  return TangentVector(p, HermitianOperator(-0.5 * (realized + realized.adjoint())));
}

/// Seg([x], [y]) = [x (x) y].
inline ProjectivePoint segre(const ProjectivePoint& pa, const ProjectivePoint& pb) {
  return project(tensor(pa.representative(), pb.representative()));
}

/// Solution of i dp/dt = [H, p] (hbar = 1): [exp(-iHt) x].
inline ProjectivePoint schrodinger_flow(const ProjectivePoint& p, const HermitianOperator& h, double t) {
  if (h.dim() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "Hamiltonian/point dimension");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenDecompositionFailure, "Hamiltonian diagonalization");
  const Matrix& v = solver.eigenvectors();
  Vector coeffs = v.adjoint() * p.representative();
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::polar(1.0, -solver.eigenvalues()[k] * t);
  return project(v * coeffs);
}

/// Points p(k t / steps) for k = 0..steps.
inline std::vector<ProjectivePoint> schrodinger_trajectory(const ProjectivePoint& p, const HermitianOperator& h,
                                                           double t, int steps) {
  if (steps < 1) throw Error(ErrorKind::BadParameter, "steps must be positive");
  std::vector<ProjectivePoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) out.push_back(schrodinger_flow(p, h, t * k / steps));
  return out;
}

}  // namespace projmi
