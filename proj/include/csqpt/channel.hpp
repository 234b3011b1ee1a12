#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "csqpt/fock.hpp"

namespace csqpt {

inline constexpr double kCptpTolerance = 1e-6;

/// A channel rho -> sum_i K_i rho K_i^dagger stored as its Kraus operators.
///
/// Construction never fails on a trace-preservation defect; instead the set
/// records whether ||sum K^dagger K - I||_F <= kCptpTolerance ("certified").
/// Optimizer iterates are therefore representable, while everything that
/// promises a physical channel calls `certify()`.
class KrausSet {
 public:
  explicit KrausSet(std::vector<CMatrix> operators);

  /// Splits a vertical stack of `rank` square blocks.
  static KrausSet from_stacked(const CMatrix& stacked, int rank);

  int dim() const { return dim_; }
  FockDim fock_dim() const { return FockDim(dim_); }
  int rank() const { return static_cast<int>(ops_.size()); }
  const std::vector<CMatrix>& operators() const { return ops_; }
  const CMatrix& operator[](std::size_t i) const { return ops_[i]; }

  /// ||sum_i K_i^dagger K_i - I||_F.
  double tp_defect() const { return defect_; }
  bool certified() const { return defect_ <= kCptpTolerance; }

  /// Throws NumericalError if the set is not certified CPTP; returns *this.
  const KrausSet& certify() const;

  /// (rank * d) x d matrix with the operators stacked top to bottom.
  CMatrix stacked() const;

 private:
  std::vector<CMatrix> ops_;
  int dim_ = 0;
  double defect_ = 0.0;
};

/// Choi matrix J = sum_i vec(K_i) vec(K_i)^dagger (column-stacking), so that
/// J[(i + d m), (j + d n)] = <i| E(|m><n|) |j>. Trace equals d for
/// trace-preserving channels.
CMatrix kraus_to_choi(const KrausSet& channel);

/// Kraus operators sqrt(lambda) unvec(v) from the Choi eigenpairs, largest
/// first. Eigenvalues below 1e-10 (or beyond `rank_cut`) are discarded;
/// eigenvalues below -1e-6 mean the input is not a CP map.
KrausSet choi_to_kraus(const CMatrix& choi, std::optional<int> rank_cut = std::nullopt);

/// Superoperator S with vec(E(rho)) = S vec(rho).
CMatrix superoperator(const KrausSet& channel);
CMatrix superoperator_to_choi(const CMatrix& super);
CMatrix choi_to_superoperator(const CMatrix& choi);

/// Channel distance used for all channel comparisons: ||J_a - J_b||_F.
double choi_distance(const KrausSet& a, const KrausSet& b);

KrausSet identity_channel(FockDim dim);

/// Rank-1 channel {U}; throws ValidationError for a non-unitary U.
KrausSet unitary_channel(const CMatrix& u);

/// sum_i K_i rho K_i^dagger.
CMatrix apply_channel(const KrausSet& channel, const CMatrix& rho);

/// a after b. Kraus products are formed and compressed to a minimal
/// orthogonal Kraus set through the Gram (or Choi) eigendecomposition.
KrausSet compose(const KrausSet& a, const KrausSet& b);

/// Minimal Kraus set spanning the same channel (drops weights below 1e-10).
KrausSet compress(const KrausSet& channel);

/// Cavity coherence times in microseconds. Infinity switches a process off.
struct CoherenceTimes {
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_us = std::numeric_limits<double>::infinity();

  /// 1/T_phi = 1/T2 - 1/(2 T1); throws ValidationError when negative.
  double pure_dephasing_rate() const;
  double loss_rate() const { return 1.0 / t1_us; }
  void validate() const;
};

struct DecoherenceParams {
  CoherenceTimes times;
  double duration_us = 0.0;
  void validate() const;
};

/// Measured cavity coherence times of the reference device (T1c, T2c).
inline constexpr CoherenceTimes kReferenceCavityTimes{315.0, 478.0};

/// Dense Lindblad generator L with vec(d rho/dt) = L vec(rho).
CMatrix lindblad_superoperator(const CMatrix& hamiltonian, const std::vector<CMatrix>& collapse_ops);

/// exp(duration L) for photon loss sqrt(1/T1) a and pure dephasing
/// sqrt(2/T_phi) a^dagger a, as a superoperator.
CMatrix cavity_decay_superoperator(const DecoherenceParams& params, FockDim dim);

/// Same channel in Kraus form (extracted through choi_to_kraus).
KrausSet cavity_decay_channel(const DecoherenceParams& params, FockDim dim);

}  // namespace csqpt
