#pragma once

// Independent reference values: one-dimensional quadratures and closed-form
// moments of the invariant measure. Nothing here depends on the Monte Carlo
// engine, so these values can validate it.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "projmi/error.hpp"
#include "projmi/qstate.hpp"

namespace projmi::oracles {

inline constexpr double kQuadratureAbsTol = 1e-10;
/// Upper cutoff for Gaussian-weighted radial integrals; the tail beyond it is below 1e-300.
inline constexpr double kRadialCutoff = 40.0;

namespace detail {

inline void require_converged(double value, double error, const char* what) {
  if (!std::isfinite(value) || error > kQuadratureAbsTol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", error);
    throw Error(ErrorKind::QuadratureNotConverged, std::string(what) + ": error estimate " + buf);
  }
}

/// Adaptive Gauss-Kronrod for smooth integrands.
template <class F>
double adaptive_integral(F f, double a, double b, const char* what) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, 1e-13, &error);
  require_converged(value, error, what);
  return value;
}

/// Tanh-sinh for integrands with endpoint (log) singularities.
template <class F>
double endpoint_integral(F f, double a, double b, const char* what) {
  double error = 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double value = integrator.integrate(f, a, b, 1e-13, &error);
  require_converged(value, error, what);
  return value;
}

}  // namespace detail

/// int_0^inf x^3 log2(x^2) exp(-x^2/2) dx, by adaptive Gauss-Kronrod on [0, 40].
inline double radial_log_moment() {
  return detail::adaptive_integral(
      [](double x) { return x > 0.0 ? x * x * x * std::log2(x * x) * std::exp(-0.5 * x * x) : 0.0; }, 0.0,
      kRadialCutoff, "radial_log_moment");
}

/// Closed form of radial_log_moment: 2 + (2 - 2 gamma) log2 e.
inline double radial_log_moment_closed_form() {
  return 2.0 + (2.0 - 2.0 * 0.5772156649015329) * std::numbers::log2e;
}

/// Entropy -int rho log2 rho dmu of a pure state in dimension n. Under nu,
/// u = tr(sigma p) is Beta(1, n - 1) distributed, so the value is
/// -n int_0^1 u log2(u) (n - 1)(1 - u)^(n - 2) du.
inline double beta_pure_entropy(int n) {
  if (n < 3) throw Error(ErrorKind::BadParameter, "beta_pure_entropy needs n >= 3");
  const double value = detail::endpoint_integral(
      [n](double u) { return u > 0.0 ? u * std::log2(u) * (n - 1) * std::pow(1.0 - u, n - 2) : 0.0; }, 0.0, 1.0,
      "beta_pure_entropy");
  return -n * value;
}

inline double harmonic_number(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

/// (H_n - 1) log2 e.
inline double beta_pure_entropy_closed_form(int n) { return (harmonic_number(n) - 1.0) * std::numbers::log2e; }

/// E_nu[tr(A p)] = tr(A) / n.
inline double moment_first(const HermitianOperator& a) { return a.trace() / a.dim(); }

/// E_nu[tr(A p) tr(B p)] = (tr(A) tr(B) + tr(AB)) / (n (n + 1)).
inline double moment_second(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "moment_second operand dimensions");
  const double n = a.dim();
  return (a.trace() * b.trace() + (a.matrix() * b.matrix()).trace().real()) / (n * (n + 1.0));
}

}  // namespace projmi::oracles
