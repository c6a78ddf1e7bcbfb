#pragma once

// Canonical state families and random matrix ensembles.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "projmi/error.hpp"
#include "projmi/qstate.hpp"
#include "projmi/rng.hpp"

namespace projmi {

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal absorbed into Q.
inline Matrix random_unitary(int n, CounterStream& stream) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = stream.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// GUE-like Hermitian matrix (G + G^dagger) / 2 with standard complex Gaussian G.
inline HermitianOperator random_hermitian(int n, CounterStream& stream) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = stream.complex_normal();
  Matrix h = 0.5 * (g + g.adjoint());
  return HermitianOperator(0.5 * (h + h.adjoint()));
}

inline Vector random_unit_vector(int n, CounterStream& stream) {
  Vector x = gaussian_sample(n, stream);
  return x / x.norm();
}

inline DensityMatrix pure_state(const Vector& psi) {
  const Vector unit = psi / psi.norm();
  return validate_density(unit * unit.adjoint());
}

/// G G^dagger / tr(G G^dagger) for an n x rank complex Gaussian G.
inline DensityMatrix random_mixed_state(int n, int rank, CounterStream& stream) {
  if (rank < 1 || rank > n) {
    throw Error(ErrorKind::BadParameter, "rank must be in [1, n], got " + std::to_string(rank));
  }
  Matrix g(n, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = stream.complex_normal();
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return validate_density(m);
}

inline DensityMatrix maximally_mixed(int n) {
  return validate_density(Matrix::Identity(n, n) / static_cast<double>(n));
}

inline DensityMatrix basis_state(int n, int index) {
  if (index < 0 || index >= n) throw Error(ErrorKind::BadParameter, "basis index out of range");
  Matrix m = Matrix::Zero(n, n);
  m(index, index) = 1.0;
  return validate_density(m);
}

/// |Phi><Phi| with |Phi> = d^{-1/2} sum_i |i>|i>.
inline DensityMatrix maximally_entangled(int d) {
  if (d < 1) throw Error(ErrorKind::BadParameter, "d must be positive");
  Vector phi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  return validate_density(phi * phi.adjoint());
}

/// (1/d) sum_i |ii><ii|.
inline DensityMatrix classically_correlated(int d) {
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) m(i * d + i, i * d + i) = 1.0 / d;
  return validate_density(m);
}

// ---------------------------------------------------------------------------
// Family descriptors consumed by make_state.

namespace family {
struct MaxEnt { int d; };
struct MaxMixed { int n; };
struct Classical { int d; };
struct PureRandom { int n; };
struct MixedRandom { int n; int rank; };
struct BasisPure { int n; int index; };
/// Tensor product of two random states; rank 1 gives pure factors.
struct Product { int dim_a; int dim_b; int rank_a; int rank_b; };
/// Random separable mixture of `terms` products of pure states.
struct SeparableMix { int dim_a; int dim_b; int terms; };
}  // namespace family

using StateFamily = std::variant<family::MaxEnt, family::MaxMixed, family::Classical, family::PureRandom,
                                 family::MixedRandom, family::BasisPure, family::Product, family::SeparableMix>;

/// Bipartite structure implied by a family, if any.
inline std::optional<BipartiteDims> natural_dims(const StateFamily& f) {
  return std::visit(
      [](const auto& s) -> std::optional<BipartiteDims> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, family::MaxEnt> || std::is_same_v<T, family::Classical>) {
          return BipartiteDims(s.d, s.d);
        } else if constexpr (std::is_same_v<T, family::Product> || std::is_same_v<T, family::SeparableMix>) {
          return BipartiteDims(s.dim_a, s.dim_b);
        } else {
          return std::nullopt;
        }
      },
      f);
}

namespace detail {
inline void require_positive(int v, const char* name) {
  if (v < 1) throw Error(ErrorKind::BadParameter, std::string(name) + " must be positive, got " + std::to_string(v));
}
}  // namespace detail

/// Deterministic for a fixed (family, seed).
inline DensityMatrix make_state(const StateFamily& f, std::uint64_t seed) {
  CounterStream stream(seed, 0);
  struct Visitor {
    CounterStream& stream;

    DensityMatrix operator()(const family::MaxEnt& s) const {
      detail::require_positive(s.d, "d");
      return maximally_entangled(s.d);
    }
    DensityMatrix operator()(const family::MaxMixed& s) const {
      detail::require_positive(s.n, "n");
      return maximally_mixed(s.n);
    }
    DensityMatrix operator()(const family::Classical& s) const {
      detail::require_positive(s.d, "d");
      return classically_correlated(s.d);
    }
    DensityMatrix operator()(const family::PureRandom& s) const {
      detail::require_positive(s.n, "n");
      return pure_state(random_unit_vector(s.n, stream));
    }
    DensityMatrix operator()(const family::MixedRandom& s) const {
      detail::require_positive(s.n, "n");
      return random_mixed_state(s.n, s.rank, stream);
    }
    DensityMatrix operator()(const family::BasisPure& s) const {
      detail::require_positive(s.n, "n");
      return basis_state(s.n, s.index);
    }
    DensityMatrix operator()(const family::Product& s) const {
      const BipartiteDims dims(s.dim_a, s.dim_b);
      const DensityMatrix a = random_mixed_state(dims.dim_a(), s.rank_a, stream);
      const DensityMatrix b = random_mixed_state(dims.dim_b(), s.rank_b, stream);
      return tensor(a, b);
    }
    DensityMatrix operator()(const family::SeparableMix& s) const {
      const BipartiteDims dims(s.dim_a, s.dim_b);
      detail::require_positive(s.terms, "terms");
      std::vector<double> weights(s.terms);
      double total = 0.0;
      for (auto& w : weights) total += (w = -std::log(stream.uniform_open0()));
      Matrix m = Matrix::Zero(dims.total(), dims.total());
      for (int t = 0; t < s.terms; ++t) {
        const Vector a = random_unit_vector(dims.dim_a(), stream);
        const Vector b = random_unit_vector(dims.dim_b(), stream);
        const Vector ab = tensor(a, b);
        m += (weights[t] / total) * ab * ab.adjoint();
      }
      return validate_density(m);
    }
  };
  return std::visit(Visitor{stream}, f);
}

}  // namespace projmi
