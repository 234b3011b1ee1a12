#pragma once

#include <cstdint>
#include <vector>

#include "csqpt/channel.hpp"

namespace csqpt {

/// Coherent-state probe amplitudes alpha_i.
struct ProbeGrid {
  std::vector<cplx> alphas;

  /// side x side square grid from -max-max*i to max+max*i, real part fastest.
  static ProbeGrid square(int side, double max_extent);
  /// 5 x 5 grid with corners -1.5-1.5i and 1.5+1.5i.
  static ProbeGrid default_grid() { return square(5, 1.5); }
  Index size() const { return static_cast<Index>(alphas.size()); }
};

/// Wigner-function sample points beta_j. When the points form a uniform square
/// lattice (row-major, real part fastest) `side` and `spacing` describe it;
/// otherwise side == 0.
struct WignerGrid {
  std::vector<cplx> betas;
  int side = 0;
  double spacing = 0.0;

  static WignerGrid square(int side, double max_extent);
  /// 21 x 21 grid with maximal real/imaginary extent 2.62.
  static WignerGrid default_grid() { return square(21, 2.62); }
  /// Wraps arbitrary points, recognizing a square lattice when present.
  static WignerGrid from_points(std::vector<cplx> betas);
  Index size() const { return static_cast<Index>(betas.size()); }
  bool is_lattice() const { return side > 0; }
};

struct TomographyDataset {
  int dim = 0;  // Fock dimension used to simulate the data (0 if unknown)
  ProbeGrid probes;
  WignerGrid grid;
  RMatrix values;  // n_probes x n_betas
  int shots = 0;   // 0 means exact expectation values
  std::uint64_t seed = 0;
  bool normalized = false;

  void validate() const;
};

/// W(beta) = (2/pi) Tr[D(beta)^dagger rho D(beta) P].
double wigner_value(const CMatrix& rho, cplx beta);

/// Observables M_j = (2/pi) D(beta_j) P D(beta_j)^dagger so that W = Tr[M_j rho].
std::vector<CMatrix> displaced_parity_observables(const WignerGrid& grid, FockDim dim);

/// Applies the channel to every probe |alpha_i><alpha_i| and evaluates the
/// output Wigner function on the grid. With shots > 0 each value is replaced
/// by a binomial parity estimate drawn from a generator seeded independently
/// per (probe, beta) pair. Values are in trace-normalized units, so the
/// dataset is marked normalized.
TomographyDataset simulate_dataset(const KrausSet& channel, const ProbeGrid& probes, const WignerGrid& grid,
                                   int shots, std::uint64_t seed);

/// Riemann estimate tau_i = sum_j W_ij spacing^2 of Tr(rho_i) for every probe.
RVector slice_traces(const TomographyDataset& ds);

/// Rescales every probe slice by 1/tau_i. Throws DataError when tau_i <= 0.5
/// or the grid is not a uniform lattice.
TomographyDataset normalize_dataset(const TomographyDataset& ds);

/// Keeps every stride-th beta along both lattice axes.
TomographyDataset subsample_grid(const TomographyDataset& ds, int stride);

/// Worker count from CSQPT_THREADS (default: hardware concurrency).
unsigned worker_count();

}  // namespace csqpt
