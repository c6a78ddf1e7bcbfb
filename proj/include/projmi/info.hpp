#pragma once

// Information measures on projective space: differential entropies with
// respect to mu and the classical-like mutual information of a bipartite
// state restricted to the Segre variety.
//
// Two estimators of the mutual information are provided and are kept
// separate on purpose:
//  - classical_like_mi_projective integrates over mu_A x mu_B with unit
//    representatives (total masses n_A and n_B);
//  - classical_like_mi_paper evaluates the Gaussian integral over
//    decomplexified H_A x H_B literally, with unnormalized vectors.
// The two differ by the radial second moments of the Gaussian weights; the
// ratio is measured and reported by mi_report, never assumed.
//
// All logarithms are base 2.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "projmi/error.hpp"
#include "projmi/mc.hpp"
#include "projmi/projective.hpp"
#include "projmi/qstate.hpp"
#include "projmi/rng.hpp"

namespace projmi {

inline constexpr double kEulerGamma = 0.5772156649015329;
/// Densities at or below this value are treated as outside the support.
inline constexpr double kSupportFloor = 1e-15;

namespace detail {

/// -w log2 w with 0 log 0 = 0 below the support floor.
inline double neg_w_log2_w(double w) { return w <= kSupportFloor ? 0.0 : -w * std::log2(w); }

inline void require_bipartite(const DensityMatrix& sigma, const BipartiteDims& dims) {
  if (sigma.dim() != dims.total()) {
    throw Error(ErrorKind::DimensionMismatch, "state of dimension " + std::to_string(sigma.dim()) +
                                                  " does not factor as " + std::to_string(dims.dim_a()) + "x" +
                                                  std::to_string(dims.dim_b()));
  }
}

/// <x (x) y | sigma | x (x) y> without forming sigma (x)-products; `z` is scratch.
inline double product_quadratic_form(const Matrix& sigma, const Vector& x, const Vector& y, Vector& z) {
  const Eigen::Index nb = y.size();
  for (Eigen::Index a = 0; a < x.size(); ++a) z.segment(a * nb, nb) = x[a] * y;
  return z.dot(sigma * z).real();
}

}  // namespace detail

/// (p_A, p_B) -> tr(sigma (p_A (x) p_B)), the Liouville density of sigma
/// pulled back along the Segre map.
class JointDensity {
 public:
  JointDensity(DensityMatrix sigma, BipartiteDims dims) : sigma_(std::move(sigma)), dims_(dims) {
    detail::require_bipartite(sigma_, dims_);
  }

  const DensityMatrix& source() const { return sigma_; }
  const BipartiteDims& dims() const { return dims_; }

  double operator()(const ProjectivePoint& pa, const ProjectivePoint& pb) const {
    if (pa.dim() != dims_.dim_a() || pb.dim() != dims_.dim_b()) {
      throw Error(ErrorKind::DimensionMismatch, "joint density evaluated off P(H_A) x P(H_B)");
    }
    Vector z(dims_.total());
    return detail::product_quadratic_form(sigma_.matrix(), pa.representative(), pb.representative(), z);
  }

 private:
  DensityMatrix sigma_;
  BipartiteDims dims_;
};

inline JointDensity joint_density_eval(const DensityMatrix& sigma, const BipartiteDims& dims) {
  return JointDensity(sigma, dims);
}

/// Marginal of the joint density obtained by integrating one factor out
/// against mu. Evaluated on the remaining factor's projective space.
class MarginalDensity {
 public:
  MarginalDensity(DensityMatrix sigma, BipartiteDims dims, Subsystem integrate_out)
      : joint_(std::move(sigma), dims),
        integrate_out_(integrate_out),
        reduced_(partial_trace(joint_.source(), dims, kept())) {}

  Subsystem kept() const { return integrate_out_ == Subsystem::A ? Subsystem::B : Subsystem::A; }
  const DensityMatrix& reduced_state() const { return reduced_; }

  /// tr(sigma_kept p).
  double analytic(const ProjectivePoint& p) const {
    if (p.dim() != reduced_.dim()) throw Error(ErrorKind::DimensionMismatch, "marginal evaluated off its space");
    const Vector& x = p.representative();
    return x.dot(reduced_.matrix() * x).real();
  }

  /// Monte Carlo integral of the joint density over the traced-out factor.
  MCEstimate monte_carlo(const ProjectivePoint& p, const SamplerConfig& cfg) const {
    if (p.dim() != reduced_.dim()) throw Error(ErrorKind::DimensionMismatch, "marginal evaluated off its space");
    const int n_other = joint_.dims().dim(integrate_out_);
    if (integrate_out_ == Subsystem::A) {
      return integrate_mu([&](const ProjectivePoint& q) { return joint_(q, p); }, n_other, cfg, "marginal_mc");
    }
    return integrate_mu([&](const ProjectivePoint& q) { return joint_(p, q); }, n_other, cfg, "marginal_mc");
  }

 private:
  JointDensity joint_;
  Subsystem integrate_out_;
  DensityMatrix reduced_;
};

inline MarginalDensity marginal_density(const DensityMatrix& sigma, const BipartiteDims& dims,
                                        Subsystem integrate_out) {
  return MarginalDensity(sigma, dims, integrate_out);
}

/// -int rho_sigma log2 rho_sigma dmu, estimated as -n E_nu[rho log2 rho].
inline MCEstimate differential_entropy_mu(const DensityMatrix& sigma, const SamplerConfig& cfg) {
  const int n = sigma.dim();
  const Matrix& s = sigma.matrix();
  return estimate_mean(cfg, "canonical-mu", [&] {
    return [&s, n, x = Vector(n)](CounterStream& stream) mutable {
      stream.fill_complex_normal(x);
      x /= x.norm();
      const double rho = x.dot(s * x).real();
      return static_cast<double>(n) * detail::neg_w_log2_w(rho);
    };
  });
}

/// Closed form (2 gamma - 2) log2 e - 2 of the Gaussian pure-state entropy.
inline double pure_state_entropy_paper_constant() {
  return (2.0 * kEulerGamma - 2.0) * std::numbers::log2e - 2.0;
}

/// -E[|<psi|x>|^2 log2 |<psi|x>|^2] over unnormalized Gaussian x.
inline MCEstimate pure_state_entropy_paper_mc(const Vector& psi, const SamplerConfig& cfg) {
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw Error(ErrorKind::BadParameter, "psi must be a unit vector");
  const int n = static_cast<int>(psi.size());
  return estimate_mean(cfg, "paper-gaussian", [&] {
    return [&psi, x = Vector(n)](CounterStream& stream) mutable {
      stream.fill_complex_normal(x);
      return detail::neg_w_log2_w(std::norm(psi.dot(x)));
    };
  });
}

namespace detail {

/// Shared sampler for both MI estimators. With `normalize` the directions are
/// unit vectors (projective form); otherwise the raw Gaussian vectors are used.
class MISampler {
 public:
  MISampler(const Matrix& sigma, const Matrix& sigma_a, const Matrix& sigma_b, const BipartiteDims& dims,
            bool normalize)
      : sigma_(sigma),
        sigma_a_(sigma_a),
        sigma_b_(sigma_b),
        normalize_(normalize),
        scale_(normalize ? static_cast<double>(dims.total()) : 1.0),
        x_(dims.dim_a()),
        y_(dims.dim_b()),
        z_(dims.total()) {}

  double operator()(CounterStream& stream) {
    stream.fill_complex_normal(x_);
    stream.fill_complex_normal(y_);
    if (normalize_) {
      x_ /= x_.norm();
      y_ /= y_.norm();
    }
    const double w = product_quadratic_form(sigma_, x_, y_, z_);
    if (w <= kSupportFloor) return 0.0;
    const double ma = x_.dot(sigma_a_ * x_).real();
    const double mb = y_.dot(sigma_b_ * y_).real();
    if (ma <= kSupportFloor || mb <= kSupportFloor) {
      throw Error(ErrorKind::MarginalZeroAnomaly, "joint density " + format_double(w) +
                                                      " is positive where a marginal vanishes (" +
                                                      format_double(ma) + ", " + format_double(mb) + ")");
    }
    return scale_ * w * std::log2(w / (ma * mb));
  }

 private:
  const Matrix& sigma_;
  const Matrix& sigma_a_;
  const Matrix& sigma_b_;
  bool normalize_;
  double scale_;
  Vector x_, y_, z_;
};

inline MCEstimate mi_estimate(const DensityMatrix& sigma, const BipartiteDims& dims, const SamplerConfig& cfg,
                              bool normalize, std::string method) {
  require_bipartite(sigma, dims);
  const Matrix sa = partial_trace(sigma.matrix(), dims, Subsystem::A);
  const Matrix sb = partial_trace(sigma.matrix(), dims, Subsystem::B);
  return estimate_mean(cfg, std::move(method),
                       [&] { return MISampler(sigma.matrix(), sa, sb, dims, normalize); });
}

}  // namespace detail

/// Mutual information of the Segre-restricted density over mu_A x mu_B, using
/// the analytic (partial-trace) marginals.
inline MCEstimate classical_like_mi_projective(const DensityMatrix& sigma, const BipartiteDims& dims,
                                               const SamplerConfig& cfg) {
  return detail::mi_estimate(sigma, dims, cfg, true, "projective");
}

/// The Gaussian-integral form of the mutual information with unnormalized
/// x, y; points with <x(x)y|sigma|x(x)y> <= 1e-15 contribute 0.
inline MCEstimate classical_like_mi_paper(const DensityMatrix& sigma, const BipartiteDims& dims,
                                          const SamplerConfig& cfg) {
  return detail::mi_estimate(sigma, dims, cfg, false, "paper-gaussian");
}

/// h_joint = -int int rho o Seg log2 (rho o Seg) dmu_A dmu_B.
inline MCEstimate joint_differential_entropy(const DensityMatrix& sigma, const BipartiteDims& dims,
                                             const SamplerConfig& cfg) {
  detail::require_bipartite(sigma, dims);
  const Matrix& s = sigma.matrix();
  const double mass = dims.total();
  return estimate_mean(cfg, "joint-entropy", [&] {
    return [&s, mass, x = Vector(dims.dim_a()), y = Vector(dims.dim_b()),
            z = Vector(dims.total())](CounterStream& stream) mutable {
      stream.fill_complex_normal(x);
      stream.fill_complex_normal(y);
      x /= x.norm();
      y /= y.norm();
      return mass * detail::neg_w_log2_w(detail::product_quadratic_form(s, x, y, z));
    };
  });
}

struct EntropyDecomposition {
  MCEstimate h_a;
  MCEstimate h_b;
  MCEstimate h_joint;
  MCEstimate mi;
};

/// h_A + h_B - h_joint. The three terms use independent streams derived from
/// cfg.seed, so their standard errors add in quadrature.
inline EntropyDecomposition entropy_decomposition(const DensityMatrix& sigma, const BipartiteDims& dims,
                                                  const SamplerConfig& cfg) {
  detail::require_bipartite(sigma, dims);
  SamplerConfig cfg_a = cfg;
  cfg_a.seed = mix_seed(cfg.seed, 1);
  SamplerConfig cfg_b = cfg;
  cfg_b.seed = mix_seed(cfg.seed, 2);
  SamplerConfig cfg_joint = cfg;
  cfg_joint.seed = mix_seed(cfg.seed, 3);
  EntropyDecomposition out{differential_entropy_mu(partial_trace(sigma, dims, Subsystem::A), cfg_a),
                           differential_entropy_mu(partial_trace(sigma, dims, Subsystem::B), cfg_b),
                           joint_differential_entropy(sigma, dims, cfg_joint),
                           {}};
  out.mi.mean = out.h_a.mean + out.h_b.mean - out.h_joint.mean;
  out.mi.std_error = std::sqrt(out.h_a.std_error * out.h_a.std_error + out.h_b.std_error * out.h_b.std_error +
                               out.h_joint.std_error * out.h_joint.std_error);
  out.mi.n_samples = cfg.n_samples;
  out.mi.seed = cfg.seed;
  out.mi.method = "decomposition";
  return out;
}

inline MCEstimate entropy_decomposition_mi(const DensityMatrix& sigma, const BipartiteDims& dims,
                                           const SamplerConfig& cfg) {
  return entropy_decomposition(sigma, dims, cfg).mi;
}

/// log2 d + 2 + (2 - 2 gamma) log2 e.
inline double paper_maxent_mi_closed_form(int d) {
  if (d < 3) throw Error(ErrorKind::BadParameter, "d must be >= 3, got " + std::to_string(d));
  return std::log2(static_cast<double>(d)) - pure_state_entropy_paper_constant();
}

/// Product states give roundoff-sized means with comparably tiny errors.
inline constexpr double kRatioRoundoffFloor = 1e-12;

struct MIReport {
  MCEstimate projective;
  MCEstimate paper_gaussian;
  double von_neumann = 0.0;
  /// paper_gaussian.mean / projective.mean; empty when the projective mean is
  /// within 5 standard errors (plus a 1e-12 roundoff floor) of zero.
  std::optional<double> ratio_paper_over_projective;
  /// First-order error propagation, ignoring the covariance of the two means.
  std::optional<double> ratio_std_error;
  BipartiteDims dims;
};

/// Both estimators share cfg (and therefore the same Gaussian draws).
inline MIReport mi_report(const DensityMatrix& sigma, const BipartiteDims& dims, const SamplerConfig& cfg) {
  MIReport report{classical_like_mi_projective(sigma, dims, cfg), classical_like_mi_paper(sigma, dims, cfg),
                  vn_mutual_information(sigma, dims), std::nullopt, std::nullopt, dims};
  const MCEstimate& p = report.projective;
  const MCEstimate& g = report.paper_gaussian;
  if (std::abs(p.mean) > 5.0 * p.std_error + kRatioRoundoffFloor) {
    const double r = g.mean / p.mean;
    report.ratio_paper_over_projective = r;
    report.ratio_std_error =
        std::abs(r) * std::hypot(p.std_error / p.mean, g.mean != 0.0 ? g.std_error / g.mean : 0.0);
  }
  return report;
}

}  // namespace projmi
