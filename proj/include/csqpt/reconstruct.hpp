#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csqpt/tomography.hpp"

namespace csqpt {

enum class InitKind { kIdentityPerturbed, kRandomIsometry };

/// kProximal: gradient step on the L2 term, soft-thresholding for gamma * L1,
/// then retraction. kSubgradient: step along the full (sub)gradient.
enum class StepRule { kProximal, kSubgradient };

struct ReconstructionConfig {
  int rank = 4;
  int dim = 32;
  double gamma = 4e-4;
  int max_iters = 3000;
  double step_size = 1e-3;  // first trial step; later trials use Barzilai-Borwein
  double grad_tol = 1e-8;   // on the stationarity measure (see LossReport::grad_norm)
  double loss_tol = 0.0;    // stop when a step improves the loss by less than this fraction
  std::uint64_t seed = 0;
  InitKind init = InitKind::kIdentityPerturbed;
  double init_noise = 1e-2;
  StepRule step_rule = StepRule::kProximal;

  void validate() const;
};

/// A (rank * d) x d matrix V = [K_1; ...; K_r] with V^dagger V = I, i.e. a
/// trace-preserving Kraus set. Only `retract` and `checked` build one.
class IsometryPoint {
 public:
  /// Accepts `v` if ||V^dagger V - I||_F <= 1e-8, otherwise throws.
  static IsometryPoint checked(CMatrix v, int rank);

  const CMatrix& matrix() const { return v_; }
  int rank() const { return rank_; }
  int dim() const { return static_cast<int>(v_.cols()); }
  KrausSet kraus() const { return KrausSet::from_stacked(v_, rank_); }

 private:
  friend IsometryPoint retract(const CMatrix& v, int rank);
  IsometryPoint(CMatrix v, int rank) : v_(std::move(v)), rank_(rank) {}
  CMatrix v_;
  int rank_;
};

/// Polar retraction V (V^dagger V)^{-1/2}; throws NumericalError for a
/// rank-deficient V.
IsometryPoint retract(const CMatrix& v, int rank);

/// Forward model of the Wigner data with probe states and displaced-parity
/// observables precomputed. Hermitian operators are handled through the real
/// coordinates h(X) = (X_aa, sqrt2 Re X_ab, sqrt2 Im X_ab)_{a<b}, for which
/// Tr[M X] = h(M) . h(X).
class WignerModel {
 public:
  WignerModel(const ProbeGrid& probes, const WignerGrid& grid, FockDim dim);

  int dim() const { return dim_; }
  Index probe_count() const { return probes_.cols(); }
  Index beta_count() const { return observables_.rows(); }

  /// n_probes x n_betas predicted Wigner values of the Kraus stack.
  RMatrix predict(const CMatrix& stacked, int rank) const;

  /// Real-coordinate gradient of sum_ij w_ij * W_ij(V) with respect to V:
  /// entries are dF/dRe V + i dF/dIm V.
  CMatrix weighted_gradient(const CMatrix& stacked, int rank, const RMatrix& weights) const;

 private:
  int dim_;
  CMatrix probes_;      // d x n_probes, columns |alpha_i>
  RMatrix observables_; // n_betas x d^2, rows h(M_j)
};

RMatrix predict_wigner(const IsometryPoint& v, const ProbeGrid& probes, const WignerGrid& grid);

struct LossReport {
  double l2 = 0.0;
  double l1 = 0.0;
  double total = 0.0;
  // Riemannian gradient norm, or for proximal steps the norm of the
  // gradient mapping ||V_next - V|| / t.
  double grad_norm = 0.0;
  int iters_used = 0;
  std::vector<double> history;
  bool converged = false;
  std::string warning;
};

/// Sum over Kraus entries of |Re| + |Im|.
double l1_norm(const CMatrix& stacked);

/// l2 = sum (y_data - y_pred)^2, l1 as above, total = l2 + gamma * l1.
LossReport loss(const IsometryPoint& v, const TomographyDataset& ds, double gamma);

/// Gradient of the total loss in real coordinates (dL/dRe V + i dL/dIm V).
/// The L1 part uses the subgradient sign(Re) + i sign(Im) with sign(0) = 0.
CMatrix euclidean_gradient(const IsometryPoint& v, const TomographyDataset& ds, double gamma);

/// Projection onto the tangent space of the Stiefel manifold at V under the
/// metric Re Tr[A^dagger B]: G - V herm(V^dagger G).
CMatrix project_tangent(const CMatrix& v, const CMatrix& g);

struct ReconstructionResult {
  KrausSet channel;
  LossReport report;
};

/// Initial point used by reconstruct (exposed for tests).
IsometryPoint initial_point(const ReconstructionConfig& cfg);

/// Riemannian (proximal) gradient descent on the stacked-isometry manifold
/// with an Armijo backtracking line search (factor 0.5, sufficient decrease
/// 1e-4) started from alternating Barzilai-Borwein trial steps.
/// Throws DataError for an unnormalized dataset and NumericalError if the
/// final Kraus set fails CPTP certification.
ReconstructionResult reconstruct(const TomographyDataset& ds, const ReconstructionConfig& cfg);

/// Same, starting from a given point.
ReconstructionResult reconstruct_from(const TomographyDataset& ds, const ReconstructionConfig& cfg,
                                      IsometryPoint start);

}  // namespace csqpt
