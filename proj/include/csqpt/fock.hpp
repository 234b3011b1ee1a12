#pragma once

#include <compare>
#include <span>

#include "csqpt/linalg.hpp"

namespace csqpt {

/// Truncation dimension of the oscillator Hilbert space: Fock states |0>..|d-1>.
class FockDim {
 public:
  explicit FockDim(int d) : d_(d) {
    if (d < 2) throw DimensionError("Fock dimension must be at least 2, got " + std::to_string(d));
  }
  int value() const { return d_; }
  Index size() const { return d_; }
  auto operator<=>(const FockDim&) const = default;

 private:
  int d_;
};

/// Throws DimensionError unless `m` is dim x dim.
void require_dim(const CMatrix& m, FockDim dim, const char* what);
void require_dim(const CVector& v, FockDim dim, const char* what);

inline constexpr double kTruncationTailWarning = 1e-6;

CVector fock_state(int n, FockDim dim);

/// Coherent state from its analytic Fock amplitudes, renormalized after
/// truncation. Warns when the discarded tail exceeds kTruncationTailWarning.
CVector coherent_state(cplx alpha, FockDim dim);

/// Probability mass of |alpha> beyond Fock level d-1 (before renormalization).
double coherent_tail_probability(cplx alpha, FockDim dim);

CMatrix annihilation(FockDim dim);
CMatrix number_operator(FockDim dim);

/// exp(alpha a^dagger - conj(alpha) a) computed on the truncated space, so the
/// result is exactly unitary but deviates from the infinite-dimensional
/// operator near the truncation edge.
CMatrix displacement(cplx alpha, FockDim dim);

/// Diagonal phase gate: exp(i theta_n) on |n> for n < thetas.size(), 1 above.
CMatrix snap(std::span<const double> thetas, FockDim dim);

/// Photon-number parity diag((-1)^n).
CMatrix parity(FockDim dim);

inline bool is_unitary(const CMatrix& u, double tol = 1e-8) { return unitarity_defect(u) <= tol; }

inline CMatrix projector(const CVector& psi) { return psi * psi.adjoint(); }

/// Zero-pads a state or operator into a larger space.
CVector embed(const CVector& psi, FockDim to);
CMatrix embed(const CMatrix& op, FockDim to);

/// Keeps the leading block. Density matrices are renormalized to unit trace
/// only when `renormalize` is set.
CVector truncate(const CVector& psi, FockDim to);
CMatrix truncate(const CMatrix& op, FockDim to, bool renormalize = false);

/// Mean photon number <psi|n|psi> of a (normalized) state vector.
double mean_photon_number(const CVector& psi);

}  // namespace csqpt
