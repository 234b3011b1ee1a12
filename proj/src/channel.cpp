#include "csqpt/channel.hpp"

#include <cmath>
#include <sstream>

namespace csqpt {

namespace {

constexpr double kKrausWeightCutoff = 1e-10;
constexpr double kNegativeEigenvalueLimit = -1e-6;

}  // namespace

KrausSet::KrausSet(std::vector<CMatrix> operators) : ops_(std::move(operators)) {
  if (ops_.empty()) throw ValidationError("KrausSet needs at least one operator");
  dim_ = static_cast<int>(ops_.front().rows());
  if (dim_ < 1) throw DimensionError("KrausSet: empty operator");
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (const auto& k : ops_) {
    if (k.rows() != dim_ || k.cols() != dim_) throw DimensionError("KrausSet: operators must share one square shape");
    sum.noalias() += k.adjoint() * k;
  }
  if (static_cast<long>(ops_.size()) > static_cast<long>(dim_) * dim_) {
    throw ValidationError("KrausSet: rank exceeds d^2");
  }
  defect_ = (sum - CMatrix::Identity(dim_, dim_)).norm();
}

KrausSet KrausSet::from_stacked(const CMatrix& stacked, int rank) {
  if (rank < 1 || stacked.rows() != static_cast<Index>(rank) * stacked.cols()) {
    throw DimensionError("from_stacked: expected a (rank*d) x d matrix");
  }
  const Index d = stacked.cols();
  std::vector<CMatrix> ops;
  ops.reserve(static_cast<std::size_t>(rank));
  for (int k = 0; k < rank; ++k) ops.emplace_back(stacked.middleRows(k * d, d));
  return KrausSet(std::move(ops));
}

const KrausSet& KrausSet::certify() const {
  if (!certified()) {
    std::ostringstream os;
    os << "Kraus set is not CPTP: ||sum K^dagger K - I||_F = " << defect_;
    throw NumericalError(os.str());
  }
  return *this;
}

CMatrix KrausSet::stacked() const {
  CMatrix v(static_cast<Index>(rank()) * dim_, dim_);
  for (int k = 0; k < rank(); ++k) v.middleRows(static_cast<Index>(k) * dim_, dim_) = ops_[k];
  return v;
}

CMatrix kraus_to_choi(const KrausSet& channel) {
  const Index d = channel.dim();
  CMatrix a(d * d, channel.rank());
  for (int k = 0; k < channel.rank(); ++k) a.col(k) = vec(channel[k]);
  return a * a.adjoint();
}

KrausSet choi_to_kraus(const CMatrix& choi, std::optional<int> rank_cut) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(choi.rows()))));
  if (choi.rows() != choi.cols() || d * d != choi.rows()) throw DimensionError("choi_to_kraus: Choi matrix must be d^2 x d^2");
  if (rank_cut && *rank_cut < 1) throw ValidationError("choi_to_kraus: rank cut must be positive");

  const CMatrix herm = 0.5 * (choi + choi.adjoint());
  const HermitianEigen eig = block_hermitian_eigen(herm);
  if (eig.values.minCoeff() < kNegativeEigenvalueLimit) {
    std::ostringstream os;
    os << "choi_to_kraus: Choi eigenvalue " << eig.values.minCoeff() << " is not a completely positive map";
    throw ValidationError(os.str());
  }

  std::vector<CMatrix> ops;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) < kKrausWeightCutoff) break;
    if (rank_cut && static_cast<int>(ops.size()) >= *rank_cut) break;
    ops.push_back(std::sqrt(eig.values(k)) * unvec(eig.vectors.col(k), d));
  }
  if (ops.empty()) throw ValidationError("choi_to_kraus: Choi matrix is numerically zero");
  return KrausSet(std::move(ops));
}

CMatrix superoperator(const KrausSet& channel) {
  const Index d = channel.dim();
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (const auto& k : channel.operators()) s += kron(k.conjugate(), k);
  return s;
}

CMatrix superoperator_to_choi(const CMatrix& super) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(super.rows()))));
  if (super.rows() != super.cols() || d * d != super.rows()) throw DimensionError("superoperator must be d^2 x d^2");
  CMatrix j(d * d, d * d);
  // J[i + d m, j + d n] = S[i + d j, m + d n]
  for (Index n = 0; n < d; ++n)
    for (Index jj = 0; jj < d; ++jj)
      for (Index m = 0; m < d; ++m)
        for (Index i = 0; i < d; ++i) j(i + d * m, jj + d * n) = super(i + d * jj, m + d * n);
  return j;
}

CMatrix choi_to_superoperator(const CMatrix& choi) {
  // The reshuffle is an involution.
  return superoperator_to_choi(choi);
}

double choi_distance(const KrausSet& a, const KrausSet& b) {
  if (a.dim() != b.dim()) throw DimensionError("choi_distance: dimension mismatch");
  return (kraus_to_choi(a) - kraus_to_choi(b)).norm();
}

KrausSet identity_channel(FockDim dim) { return KrausSet({CMatrix::Identity(dim.size(), dim.size())}); }

KrausSet unitary_channel(const CMatrix& u) {
  if (u.rows() != u.cols()) throw DimensionError("unitary_channel: operator is not square");
  const double defect = unitarity_defect(u);
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "unitary_channel: operator is not unitary (defect " << defect << ")";
    throw ValidationError(os.str());
  }
  return KrausSet({u});
}

CMatrix apply_channel(const KrausSet& channel, const CMatrix& rho) {
  require_dim(rho, channel.fock_dim(), "apply_channel");
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : channel.operators()) out.noalias() += k * rho * k.adjoint();
  return out;
}

namespace {

KrausSet compress_columns(const CMatrix& vecs, Index d) {
  const Index count = vecs.cols();
  std::vector<CMatrix> ops;
  if (count <= d * d) {
    const CMatrix gram = vecs.adjoint() * vecs;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericalError("compose: Gram eigensolver failed");
    for (Index k = count - 1; k >= 0; --k) {
      const double w = solver.eigenvalues()(k);
      if (w < kKrausWeightCutoff) break;
      ops.push_back(unvec(vecs * solver.eigenvectors().col(k), d));
    }
    if (ops.empty()) throw ValidationError("compose: channel is numerically zero");
    return KrausSet(std::move(ops));
  }
  return choi_to_kraus(vecs * vecs.adjoint());
}

}  // namespace

KrausSet compress(const KrausSet& channel) {
  const Index d = channel.dim();
  CMatrix vecs(d * d, channel.rank());
  for (int k = 0; k < channel.rank(); ++k) vecs.col(k) = vec(channel[k]);
  return compress_columns(vecs, d);
}

KrausSet compose(const KrausSet& a, const KrausSet& b) {
  if (a.dim() != b.dim()) throw DimensionError("compose: dimension mismatch");
  const Index d = a.dim();
  if (a.rank() == 1 && b.rank() == 1) return KrausSet({a[0] * b[0]});
  CMatrix vecs(d * d, static_cast<Index>(a.rank()) * b.rank());
  Index col = 0;
  for (const auto& ka : a.operators())
    for (const auto& kb : b.operators()) vecs.col(col++) = vec(ka * kb);
  return compress_columns(vecs, d);
}

double CoherenceTimes::pure_dephasing_rate() const {
  const double rate = 1.0 / t2_us - 0.5 / t1_us;
  // Round-off when T2 = 2 T1 exactly.
  if (rate < 0.0 && rate > -1e-15 * (1.0 / t2_us)) return 0.0;
  if (rate < 0.0) {
    std::ostringstream os;
    os << "coherence times T1=" << t1_us << " T2=" << t2_us << " imply a negative dephasing rate (T2 > 2 T1)";
    throw ValidationError(os.str());
  }
  return rate;
}

void CoherenceTimes::validate() const {
  if (!(t1_us > 0.0) || !(t2_us > 0.0)) throw ValidationError("coherence times must be positive");
  pure_dephasing_rate();
}

void DecoherenceParams::validate() const {
  times.validate();
  if (!(duration_us >= 0.0) || !std::isfinite(duration_us)) throw ValidationError("duration must be finite and >= 0");
}

CMatrix lindblad_superoperator(const CMatrix& hamiltonian, const std::vector<CMatrix>& collapse_ops) {
  const Index d = hamiltonian.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix l = -kI * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  for (const auto& c : collapse_ops) {
    if (c.rows() != d || c.cols() != d) throw DimensionError("lindblad_superoperator: collapse operator shape");
    const CMatrix cdc = c.adjoint() * c;
    l += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
  }
  return l;
}

CMatrix cavity_decay_superoperator(const DecoherenceParams& params, FockDim dim) {
  params.validate();
  const Index d = dim.size();
  const double loss = params.times.loss_rate();
  const double dephasing = params.times.pure_dephasing_rate();
  if (params.duration_us == 0.0 || (loss == 0.0 && dephasing == 0.0)) return CMatrix::Identity(d * d, d * d);

  std::vector<CMatrix> collapse;
  if (loss > 0.0) collapse.push_back(std::sqrt(loss) * annihilation(dim));
  if (dephasing > 0.0) collapse.push_back(std::sqrt(2.0 * dephasing) * number_operator(dim));
  const CMatrix generator = lindblad_superoperator(CMatrix::Zero(d, d), collapse);
  // Loss and dephasing only couple rho(m, n) to rho(m - k, n - k), so the
  // generator splits into independent coherence blocks.
  return expm_block_sparse(params.duration_us * generator);
}

KrausSet cavity_decay_channel(const DecoherenceParams& params, FockDim dim) {
  const CMatrix s = cavity_decay_superoperator(params, dim);
  return choi_to_kraus(superoperator_to_choi(s)).certify();
}

}  // namespace csqpt
