#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "csqpt/channel.hpp"

namespace csqpt::testing {

inline CMatrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = cplx(normal(rng), normal(rng));
  return m;
}

// Random isometry from the Q factor of a Gaussian matrix.
inline CMatrix random_isometry(Index rows, Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(rows, cols, rng));
  return qr.householderQ() * CMatrix::Identity(rows, cols);
}

inline KrausSet random_channel(int d, int rank, std::mt19937_64& rng) {
  return KrausSet::from_stacked(random_isometry(static_cast<Index>(rank) * d, d, rng), rank);
}

inline CMatrix random_unitary(int d, std::mt19937_64& rng) { return random_isometry(d, d, rng); }

inline CMatrix random_density(int d, std::mt19937_64& rng) {
  const CMatrix g = gaussian_matrix(d, d, rng);
  const CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  const CMatrix g = gaussian_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

// Channel action without any Kraus-level shortcuts.
inline CMatrix naive_apply(const std::vector<CMatrix>& kraus, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

// Fixed-step RK4 integration of d rho/dt = sum_c (c rho c^+ - {c^+ c, rho}/2).
inline CMatrix integrate_lindblad(const CMatrix& rho0, const std::vector<CMatrix>& collapse, double duration,
                                  int steps) {
  auto rhs = [&](const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& c : collapse) {
      const CMatrix cdc = c.adjoint() * c;
      out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
  };
  const double h = duration / steps;
  CMatrix rho = rho0;
  for (int s = 0; s < steps; ++s) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + 0.5 * h * k1);
    const CMatrix k3 = rhs(rho + 0.5 * h * k2);
    const CMatrix k4 = rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

}  // namespace csqpt::testing
