#include "csqpt/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

namespace csqpt {

namespace {

constexpr double kTwoOverPi = 2.0 / M_PI;

std::vector<cplx> square_points(int side, double max_extent) {
  if (side < 1) throw ValidationError("grid side must be positive");
  if (!(max_extent >= 0.0)) throw ValidationError("grid extent must be non-negative");
  std::vector<cplx> pts;
  pts.reserve(static_cast<std::size_t>(side) * side);
  const double step = side > 1 ? 2.0 * max_extent / (side - 1) : 0.0;
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix) {
      const double re = side > 1 ? -max_extent + ix * step : 0.0;
      const double im = side > 1 ? -max_extent + iy * step : 0.0;
      pts.emplace_back(re, im);
    }
  return pts;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator for one (probe, beta) pair.
std::mt19937_64 substream(std::uint64_t seed, Index probe, Index beta) {
  const std::uint64_t s =
      splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(probe)) ^ static_cast<std::uint64_t>(beta));
  return std::mt19937_64(s);
}

template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<Index>(n, 1)));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("CSQPT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ProbeGrid ProbeGrid::square(int side, double max_extent) { return ProbeGrid{square_points(side, max_extent)}; }

WignerGrid WignerGrid::square(int side, double max_extent) {
  WignerGrid g{square_points(side, max_extent), 0, 0.0};
  if (side >= 2) {
    g.side = side;
    g.spacing = 2.0 * max_extent / (side - 1);
  }
  return g;
}

WignerGrid WignerGrid::from_points(std::vector<cplx> betas) {
  WignerGrid g{std::move(betas), 0, 0.0};
  const auto n = static_cast<int>(g.betas.size());
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (side < 2 || side * side != n) return g;
  const cplx origin = g.betas.front();
  const double spacing = g.betas[1].real() - origin.real();
  if (!(spacing > 0.0)) return g;
  const double tol = 1e-9 * std::max(1.0, spacing * side);
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix) {
      const cplx expect = origin + cplx(ix * spacing, iy * spacing);
      if (std::abs(g.betas[static_cast<std::size_t>(ix + side * iy)] - expect) > tol) return g;
    }
  g.side = side;
  g.spacing = spacing;
  return g;
}

void TomographyDataset::validate() const {
  if (probes.alphas.empty()) throw DataError("dataset has no probes");
  if (grid.betas.empty()) throw DataError("dataset has no Wigner points");
  if (values.rows() != probes.size() || values.cols() != grid.size()) {
    std::ostringstream os;
    os << "dataset values are " << values.rows() << "x" << values.cols() << " but grids imply " << probes.size()
       << "x" << grid.size();
    throw DataError(os.str());
  }
  if (shots < 0) throw DataError("shot count must be non-negative");
  if (!values.allFinite()) throw DataError("dataset contains non-finite values");
}

double wigner_value(const CMatrix& rho, cplx beta) {
  if (rho.rows() != rho.cols()) throw DimensionError("wigner_value: density matrix is not square");
  const FockDim dim(static_cast<int>(rho.rows()));
  const CMatrix d = displacement(beta, dim);
  const cplx w = kTwoOverPi * trace_product(d.adjoint() * rho * d, parity(dim));
  if (std::abs(w.imag()) > 1e-8) {
    std::ostringstream os;
    os << "wigner_value: imaginary part " << w.imag() << " (input not Hermitian?)";
    throw NumericalError(os.str());
  }
  return w.real();
}

std::vector<CMatrix> displaced_parity_observables(const WignerGrid& grid, FockDim dim) {
  const CMatrix p = parity(dim);
  std::vector<CMatrix> obs(grid.betas.size());
  parallel_for(grid.size(), [&](Index j) {
    const CMatrix d = displacement(grid.betas[static_cast<std::size_t>(j)], dim);
    obs[static_cast<std::size_t>(j)] = kTwoOverPi * d * p * d.adjoint();
  });
  return obs;
}

TomographyDataset simulate_dataset(const KrausSet& channel, const ProbeGrid& probes, const WignerGrid& grid,
                                   int shots, std::uint64_t seed) {
  if (shots < 0) throw ValidationError("shots must be non-negative");
  if (probes.alphas.empty() || grid.betas.empty()) throw ValidationError("probe and Wigner grids must be non-empty");
  const FockDim dim = channel.fock_dim();
  const auto observables = displaced_parity_observables(grid, dim);

  TomographyDataset ds;
  ds.dim = dim.value();
  ds.probes = probes;
  ds.grid = grid;
  ds.shots = shots;
  ds.seed = seed;
  ds.normalized = true;
  ds.values.resize(probes.size(), grid.size());

  std::vector<CVector> inputs;
  for (const auto& a : probes.alphas) inputs.push_back(coherent_state(a, dim));

  parallel_for(probes.size(), [&](Index i) {
    std::vector<CVector> outs;
    for (const auto& k : channel.operators()) outs.emplace_back(k * inputs[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < grid.size(); ++j) {
      const CMatrix& m = observables[static_cast<std::size_t>(j)];
      double w = 0.0;
      for (const auto& psi : outs) w += psi.dot(m * psi).real();
      if (shots > 0) {
        const double p_even = std::clamp(0.5 * (1.0 + w / kTwoOverPi), 0.0, 1.0);
        auto rng = substream(seed, i, j);
        std::binomial_distribution<int> draw(shots, p_even);
        const int k = draw(rng);
        w = kTwoOverPi * (2.0 * k / shots - 1.0);
      }
      ds.values(i, j) = w;
    }
  });
  return ds;
}

RVector slice_traces(const TomographyDataset& ds) {
  ds.validate();
  if (!ds.grid.is_lattice()) throw DataError("normalization needs a uniform square Wigner lattice");
  return ds.values.rowwise().sum() * (ds.grid.spacing * ds.grid.spacing);
}

TomographyDataset normalize_dataset(const TomographyDataset& ds) {
  const RVector tau = slice_traces(ds);
  for (Index i = 0; i < tau.size(); ++i) {
    if (!(tau(i) > 0.5)) {
      std::ostringstream os;
      os << "probe " << i << ": Wigner slice integrates to " << tau(i) << "; the grid does not capture the state";
      throw DataError(os.str());
    }
  }
  TomographyDataset out = ds;
  out.values = tau.cwiseInverse().asDiagonal() * ds.values;
  out.normalized = true;
  return out;
}

TomographyDataset subsample_grid(const TomographyDataset& ds, int stride) {
  ds.validate();
  if (stride < 1) throw ValidationError("stride must be >= 1");
  if (!ds.grid.is_lattice()) throw DataError("subsampling needs a uniform square Wigner lattice");
  if (stride == 1) return ds;
  const int side = ds.grid.side;
  const int new_side = (side - 1) / stride + 1;
  if (new_side < 3) throw DataError("subsampled grid would be smaller than 3x3");

  std::vector<Index> keep;
  for (int iy = 0; iy < side; iy += stride)
    for (int ix = 0; ix < side; ix += stride) keep.push_back(ix + static_cast<Index>(side) * iy);

  TomographyDataset out = ds;
  out.grid.betas.clear();
  out.values.resize(ds.values.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.grid.betas.push_back(ds.grid.betas[static_cast<std::size_t>(keep[c])]);
    out.values.col(static_cast<Index>(c)) = ds.values.col(keep[c]);
  }
  out.grid.side = new_side;
  out.grid.spacing = ds.grid.spacing * stride;
  return out;
}

}  // namespace csqpt
