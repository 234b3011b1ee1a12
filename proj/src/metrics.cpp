#include "csqpt/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace csqpt {

namespace {

constexpr int kLogicalDim = 2;

void require_code_dim(const KrausSet& channel, const BinomialCode& code, const char* what) {
  if (channel.dim() != code.dim.value()) throw DimensionError(std::string(what) + ": channel and code dimensions differ");
}

// Columns vec(K_i P) with P keeping input levels 0..cut.
CMatrix restricted_kraus_columns(const KrausSet& channel, int cut) {
  const Index d = channel.dim();
  const Index keep = cut + 1;
  CMatrix cols(d * keep, channel.rank());
  for (int k = 0; k < channel.rank(); ++k) cols.col(k) = vec(channel[k].leftCols(keep));
  return cols;
}

double combine_fidelity(double f_pro, double leak) { return (kLogicalDim * f_pro + 1.0 - leak) / (kLogicalDim + 1); }

// f_avg from a superoperator, without extracting Kraus operators.
double superop_avg_fidelity(const CMatrix& super, const CMatrix& u, const BinomialCode& code) {
  const Index d = code.dim.size();
  const CMatrix choi = superoperator_to_choi(super);
  const CVector vu = vec(u);
  const double f_pro = vu.dot(choi * vu).real() / (kLogicalDim * kLogicalDim);
  const CMatrix il = code.projector();
  const CVector out = super * vec(CMatrix(il / kLogicalDim));
  const double kept = trace_product(il, unvec(out, d)).real();
  return combine_fidelity(f_pro, 1.0 - kept);
}

}  // namespace

double process_fidelity_kraus(const KrausSet& channel, const CMatrix& u, const BinomialCode& code) {
  require_code_dim(channel, code, "process_fidelity_kraus");
  require_dim(u, code.dim, "process_fidelity_kraus");
  double sum = 0.0;
  for (const auto& k : channel.operators()) sum += std::norm(hs_inner(u, k));
  return sum / (kLogicalDim * kLogicalDim);
}

double state_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("state_fidelity: shape mismatch");
  const double ta = a.trace().real();
  const double tb = b.trace().real();
  if (!(ta > 0.0) || !(tb > 0.0)) throw ValidationError("state_fidelity: inputs must have positive trace");
  for (const CMatrix* m : {&a, &b}) {
    Eigen::SelfAdjointEigenSolver<CMatrix> s(0.5 * (*m + m->adjoint()), Eigen::EigenvaluesOnly);
    if (s.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, s.eigenvalues().maxCoeff())) {
      throw ValidationError("state_fidelity: input is not positive semidefinite");
    }
  }
  const CMatrix sa = psd_sqrt(a / ta);
  const CMatrix inner = sa * (b / tb) * sa;
  Eigen::SelfAdjointEigenSolver<CMatrix> s(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double root_trace = s.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, root_trace * root_trace);
}

double process_fidelity_choi(const KrausSet& a, const KrausSet& b, std::optional<int> subspace_cut) {
  if (a.dim() != b.dim()) throw DimensionError("process_fidelity_choi: dimension mismatch");
  const int cut = subspace_cut.value_or(a.dim() - 1);
  if (cut < 0 || cut >= a.dim()) throw DimensionError("process_fidelity_choi: subspace cut out of range");
  // Choi matrices factor as J = A A^dagger, and (Tr sqrt(sqrt(J_a) J_b sqrt(J_a)))
  // equals the nuclear norm of A^dagger B.
  const CMatrix ca = restricted_kraus_columns(a, cut);
  const CMatrix cb = restricted_kraus_columns(b, cut);
  const double ta = ca.squaredNorm();
  const double tb = cb.squaredNorm();
  if (!(ta > 0.0) || !(tb > 0.0)) throw ValidationError("process_fidelity_choi: channel vanishes on the subspace");
  const CMatrix overlap = ca.adjoint() * cb;
  Eigen::JacobiSVD<CMatrix> svd(overlap);
  const double nuclear = svd.singularValues().sum();
  return std::min(1.0, nuclear * nuclear / (ta * tb));
}

double leakage(const KrausSet& channel, const BinomialCode& code) {
  require_code_dim(channel, code, "leakage");
  const CMatrix il = code.projector();
  const double kept = trace_product(il, apply_channel(channel, il / kLogicalDim)).real();
  return std::clamp(1.0 - kept, 0.0, 1.0);
}

double avg_gate_fidelity_expanded(const KrausSet& channel, const CMatrix& u, const BinomialCode& code) {
  require_code_dim(channel, code, "avg_gate_fidelity");
  const CMatrix il = code.projector();
  double overlap = 0.0;
  double populations = 0.0;
  for (const auto& k : channel.operators()) {
    overlap += std::norm(hs_inner(u, k));
    const CMatrix uk = u.adjoint() * k;
    populations += trace_product(uk * il, uk.adjoint()).real();
  }
  return (overlap + populations) / (kLogicalDim * (kLogicalDim + 1));
}

FidelityReport avg_gate_fidelity(const KrausSet& channel, const CMatrix& u, const BinomialCode& code) {
  FidelityReport r;
  r.f_pro = process_fidelity_kraus(channel, u, code);
  r.leakage = leakage(channel, code);
  r.f_avg = combine_fidelity(r.f_pro, r.leakage);
  const double expanded = avg_gate_fidelity_expanded(channel, u, code);
  if (std::abs(expanded - r.f_avg) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "average gate fidelity forms disagree: " << r.f_avg << " vs " << expanded;
    throw NumericalError(os.str());
  }
  return r;
}

MonteCarloEstimate avg_gate_fidelity_monte_carlo(const KrausSet& channel, const CMatrix& u, const BinomialCode& code,
                                                 int samples, std::uint64_t seed) {
  require_code_dim(channel, code, "avg_gate_fidelity_monte_carlo");
  if (samples < 2) throw ValidationError("Monte-Carlo estimate needs at least two samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    CVector c(2);
    c << cplx(normal(rng), normal(rng)), cplx(normal(rng), normal(rng));
    c.normalize();
    const CVector psi = code.encode(c(0), c(1));
    const CVector target = u * psi;
    double f = 0.0;
    for (const auto& k : channel.operators()) f += std::norm(target.dot(k * psi));
    sum += f;
    sum_sq += f * f;
  }
  MonteCarloEstimate e;
  e.samples = samples;
  e.mean = sum / samples;
  const double var = std::max(0.0, (sum_sq - samples * e.mean * e.mean) / (samples - 1));
  e.std_error = std::sqrt(var / samples);
  return e;
}

std::vector<std::pair<int, double>> truncation_sweep(const KrausSet& channel, const KrausSet& reference,
                                                     const std::vector<int>& cuts) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (i > 0 && cuts[i] <= cuts[i - 1]) throw ValidationError("truncation_sweep: cuts must be strictly ascending");
    out.emplace_back(cuts[i], process_fidelity_choi(channel, reference, cuts[i]));
  }
  return out;
}

ErrorBudget error_budget(const GateSequence& seq, const CoherenceTimes& times, const BinomialCode& code) {
  times.validate();
  const FockDim dim = code.dim;
  const CMatrix u = ideal_logical_x(code);
  const double inf = std::numeric_limits<double>::infinity();

  auto infidelity = [&](const CoherenceTimes& t) {
    return 1.0 - superop_avg_fidelity(noisy_gate_superoperator(seq, t, dim), u, code);
  };

  ErrorBudget budget;
  budget.baseline_infidelity = 1.0 - avg_gate_fidelity(unitary_channel(compose_unitary(seq, dim)), u, code).f_avg;

  const double dephasing_rate = times.pure_dephasing_rate();
  const std::pair<std::string, CoherenceTimes> mechanisms[] = {
      {"cavity photon loss (T1)", CoherenceTimes{times.t1_us, 2.0 * times.t1_us}},
      {"cavity pure dephasing (T_phi)", CoherenceTimes{inf, dephasing_rate > 0.0 ? 1.0 / dephasing_rate : inf}},
  };
  for (const auto& [label, t] : mechanisms) {
    const bool active = t.loss_rate() > 0.0 || t.pure_dephasing_rate() > 0.0;
    ErrorBudgetEntry e;
    e.label = label;
    e.raw = active ? infidelity(t) - budget.baseline_infidelity : 0.0;
    e.contribution = e.raw;
    if (e.contribution < 0.0) {
      e.contribution = 0.0;
      e.clipped = true;
    }
    budget.entries.push_back(e);
  }
  const bool any = times.loss_rate() > 0.0 || dephasing_rate > 0.0;
  budget.all_channels_infidelity = any ? infidelity(times) : budget.baseline_infidelity;
  return budget;
}

KrausSet inject_leakage(const KrausSet& channel, const BinomialCode& code, double p, int error_level) {
  require_code_dim(channel, code, "inject_leakage");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("inject_leakage: p must lie in [0, 1]");
  const Index d = code.dim.size();
  if (error_level < 0 || error_level >= d) throw DimensionError("inject_leakage: error level out of range");
  const CVector e = fock_state(error_level, code.dim);
  if (std::norm(code.logical_zero.dot(e)) + std::norm(code.logical_one.dot(e)) > 1e-12) {
    throw ValidationError("inject_leakage: error level overlaps the code space");
  }
  const CMatrix il = code.projector();
  const CMatrix k0 = std::sqrt(1.0 - p) * il + (CMatrix::Identity(d, d) - il);
  const CMatrix k1 = std::sqrt(p) * e * code.logical_zero.adjoint();
  const CMatrix k2 = std::sqrt(p) * e * code.logical_one.adjoint();
  return compose(KrausSet({k0, k1, k2}), channel);
}

CMatrix minimal_decoder(const BinomialCode& code) {
  const Index d = code.dim.size();
  const CVector g = (CVector(2) << 1.0, 0.0).finished();
  const CVector e = (CVector(2) << 0.0, 1.0).finished();
  auto ket = [](const CVector& anc, const CVector& cav) -> CVector {
    CVector out(anc.size() * cav.size());
    for (Index a = 0; a < anc.size(); ++a) out.segment(a * cav.size(), cav.size()) = anc(a) * cav;
    return out;
  };
  const CVector g0 = ket(g, code.logical_zero);
  const CVector g1 = ket(g, code.logical_one);
  const CVector e0 = ket(e, code.logical_zero);
  const CVector e1 = ket(e, code.logical_one);
  const CMatrix error_space = CMatrix::Identity(d, d) - code.projector();

  CMatrix dec = kron(CMatrix::Identity(2, 2), error_space);
  dec += e0 * g1.adjoint() + g1 * e0.adjoint() + g0 * g0.adjoint() + e1 * e1.adjoint();
  return dec;
}

DecoderStudy decoder_study(const KrausSet& channel, const BinomialCode& code) {
  require_code_dim(channel, code, "decoder_study");
  const Index d = code.dim.size();
  const CMatrix dec = minimal_decoder(code);
  const double r = M_SQRT1_2;
  // Cardinal states as (c0, c1): 0, 1, +, -, +i, -i.
  const std::array<std::pair<cplx, cplx>, 6> cardinal = {{
      {1.0, 0.0}, {0.0, 1.0}, {r, r}, {r, -r}, {r, kI * r}, {r, -kI * r}}};

  std::array<CMatrix, 6> ancilla_out;
  for (std::size_t s = 0; s < cardinal.size(); ++s) {
    const auto [c0, c1] = cardinal[s];
    const CVector anc = (CVector(2) << c0, c1).finished();
    const CMatrix cav = apply_channel(channel, projector(code.encode(c0, c1)));
    const CMatrix joint = dec * kron(projector(anc), cav) * dec.adjoint();
    CMatrix reduced(2, 2);
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 2; ++b) reduced(a, b) = joint.block(a * d, b * d, d, d).trace();
    ancilla_out[s] = reduced;
  }

  const CMatrix paulis[4] = {
      CMatrix::Identity(2, 2),
      (CMatrix(2, 2) << 0, 1, 1, 0).finished(),
      (CMatrix(2, 2) << 0, -kI, kI, 0).finished(),
      (CMatrix(2, 2) << 1, 0, 0, -1).finished(),
  };
  const CMatrix images[4] = {
      ancilla_out[0] + ancilla_out[1],
      ancilla_out[2] - ancilla_out[3],
      ancilla_out[4] - ancilla_out[5],
      ancilla_out[0] - ancilla_out[1],
  };
  DecoderStudy study{TransferMatrix{RMatrix(4, 4), {"I", "X", "Y", "Z"}, {"I", "X", "Y", "Z"}},
                     logical_ptm(channel, code)};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) study.decoded.elements(i, j) = 0.5 * trace_product(paulis[i], images[j]).real();
  return study;
}

}  // namespace csqpt
