#pragma once

// Gaussian Monte Carlo over projective space.
//
// The invariant probability measure nu on CP^{n-1} is the push-forward of the
// standard Gaussian on C^n = R^{2n} under x -> [x], so
//   int f dnu = E[f([x])],  x ~ N(0, I_{2n}),
// and mu = n nu has total mass n.
//
// Samples are split into batches of cfg.batch_size. Batch k draws from the
// counter stream (seed, k) and batches are reduced in ascending k, so results
// are bit-identical for any number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "projmi/error.hpp"
#include "projmi/projective.hpp"
#include "projmi/qstate.hpp"
#include "projmi/rng.hpp"

namespace projmi {

inline constexpr std::int64_t kDefaultBatchSize = 4096;

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::int64_t n_samples = 100000;
  std::int64_t batch_size = kDefaultBatchSize;
  /// Worker count; 0 reads PROJMI_THREADS, falling back to hardware concurrency.
  int threads = 0;

  /// Batch size actually used (capped at n_samples).
  std::int64_t effective_batch() const { return std::min(batch_size, n_samples); }
  std::int64_t batch_count() const { return (n_samples + effective_batch() - 1) / effective_batch(); }

  void validate() const {
    if (n_samples < 2) throw Error(ErrorKind::BadParameter, "n_samples must be >= 2");
    if (batch_size < 1) throw Error(ErrorKind::BadParameter, "batch_size must be positive");
    if (threads < 0) throw Error(ErrorKind::BadParameter, "threads must be >= 0");
  }
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string method;

  /// Scale by a constant (mean and standard error alike).
  MCEstimate scaled(double factor, std::string new_method) const {
    return {mean * factor, std_error * std::abs(factor), n_samples, seed, std::move(new_method)};
  }
};

/// |a.mean - b.mean| in units of sqrt(se_a^2 + se_b^2).
inline double joint_z(const MCEstimate& a, const MCEstimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = std::abs(a.mean - b.mean);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROJMI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs `batch_fn(k, stream, first_index, count)` for every batch k and returns
/// the per-batch results in ascending k. Batches may run concurrently; the
/// first failing batch (lowest k) determines the rethrown exception.
template <class BatchFn>
auto run_batches(const SamplerConfig& cfg, BatchFn batch_fn) {
  cfg.validate();
  using Result = decltype(batch_fn(std::int64_t{}, std::declval<CounterStream&>(), std::int64_t{}, std::int64_t{}));
  const std::int64_t n_batches = cfg.batch_count();
  const std::int64_t batch = cfg.effective_batch();
  std::vector<Result> results(static_cast<std::size_t>(n_batches));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_batches));

  auto run_one = [&](std::int64_t k) {
    try {
      CounterStream stream(cfg.seed, static_cast<std::uint64_t>(k));
      const std::int64_t first = k * batch;
      const std::int64_t count = std::min(batch, cfg.n_samples - first);
      results[static_cast<std::size_t>(k)] = batch_fn(k, stream, first, count);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };

  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(cfg.threads), n_batches));
  if (workers <= 1) {
    for (std::int64_t k = 0; k < n_batches; ++k) run_one(k);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t k = next++; k < n_batches; k = next++) run_one(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Count, mean and centered second moment of one batch.
struct BatchMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }

  /// Pairwise (Chan et al.) merge.
  void merge(const BatchMoments& o) {
    if (o.count == 0) return;
    const std::int64_t total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / static_cast<double>(total);
    count = total;
  }
};

/// Mean and standard error of `sample(stream, index)` over cfg.n_samples draws.
/// `make_sampler()` is called once per batch so samplers may keep scratch
/// buffers; the sampler must be deterministic given its stream.
template <class MakeSampler>
MCEstimate estimate_mean(const SamplerConfig& cfg, std::string method, MakeSampler make_sampler) {
  auto batches = run_batches(cfg, [&](std::int64_t, CounterStream& stream, std::int64_t first, std::int64_t count) {
    auto sampler = make_sampler();
    BatchMoments m;
    for (std::int64_t i = 0; i < count; ++i) {
      const double v = sampler(stream);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NonFiniteSample,
                    "integrand returned " + std::to_string(v) + " at sample index " + std::to_string(first + i));
      }
      m.add(v);
    }
    return m;
  });
  BatchMoments total;
  for (const auto& b : batches) total.merge(b);
  const double n = static_cast<double>(total.count);
  const double variance = total.count > 1 ? total.m2 / (n - 1.0) : 0.0;
  return {total.mean, std::sqrt(std::max(variance, 0.0) / n), total.count, cfg.seed, std::move(method)};
}

using PointFunction = std::function<double(const ProjectivePoint&)>;
using PairFunction = std::function<double(const ProjectivePoint&, const ProjectivePoint&)>;

/// int f dnu over CP^{n-1}.
template <class F>
MCEstimate integrate_nu(const F& f, int n, const SamplerConfig& cfg, std::string method = "integrate_nu") {
  if (n < 1) throw Error(ErrorKind::BadParameter, "dimension must be positive");
  return estimate_mean(cfg, std::move(method), [&] {
    return [&f, x = Vector(n)](CounterStream& stream) mutable {
      stream.fill_complex_normal(x);
      return static_cast<double>(f(project(x)));
    };
  });
}

/// int f dmu = n int f dnu.
template <class F>
MCEstimate integrate_mu(const F& f, int n, const SamplerConfig& cfg, std::string method = "integrate_mu") {
  return integrate_nu(f, n, cfg).scaled(static_cast<double>(n), std::move(method));
}

/// int f(p, q) dnu_A(p) dnu_B(q) with independent Gaussian directions.
template <class F>
MCEstimate integrate_product_nu(const F& f, int n_a, int n_b, const SamplerConfig& cfg,
                                std::string method = "integrate_product_nu") {
  if (n_a < 1 || n_b < 1) throw Error(ErrorKind::BadParameter, "dimensions must be positive");
  return estimate_mean(cfg, std::move(method), [&] {
    return [&f, x = Vector(n_a), y = Vector(n_b)](CounterStream& stream) mutable {
      stream.fill_complex_normal(x);
      stream.fill_complex_normal(y);
      return static_cast<double>(f(project(x), project(y)));
    };
  });
}

inline constexpr double kReconstructionTol = 5e-2;

/// Recovers sigma from its Liouville density through the second-moment
/// identity E_nu[tr(sigma p) p] = (I + sigma) / (n (n + 1)).
///
/// The raw estimate is Hermitian by construction. It must pass validation at
/// tolerance 5e-2; it is then clamped to the PSD cone and renormalized.
template <class F>
DensityMatrix reconstruct_density_matrix(const F& rho, int n, const SamplerConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::BadParameter, "dimension must be positive");
  auto batches = run_batches(cfg, [&](std::int64_t, CounterStream& stream, std::int64_t first, std::int64_t count) {
    Matrix acc = Matrix::Zero(n, n);
    Vector x(n);
    for (std::int64_t i = 0; i < count; ++i) {
      stream.fill_complex_normal(x);
      const ProjectivePoint p = project(x);
      const double w = static_cast<double>(rho(p));
      if (!std::isfinite(w)) {
        throw Error(ErrorKind::NonFiniteSample, "density returned non-finite value at sample " + std::to_string(first + i));
      }
      const Vector& u = p.representative();
      acc.noalias() += w * (u * u.adjoint());
    }
    return acc;
  });
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& b : batches) sum += b;
  Matrix estimate = (static_cast<double>(n) * (n + 1) / static_cast<double>(cfg.n_samples)) * sum -
                    Matrix::Identity(n, n);
  estimate = 0.5 * (estimate + estimate.adjoint());
  try {
    validate_density(estimate, kReconstructionTol);
  } catch (const Error& e) {
    throw Error(ErrorKind::ReconstructionOutOfTolerance, e.what());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(estimate);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenDecompositionFailure, "reconstruction spectrum");
  Eigen::VectorXd evals = solver.eigenvalues().cwiseMax(0.0);
  evals /= evals.sum();
  const Matrix& v = solver.eigenvectors();
  Matrix clamped = v * evals.cast<cplx>().asDiagonal() * v.adjoint();
  return validate_density(0.5 * (clamped + clamped.adjoint()));
}

}  // namespace projmi
