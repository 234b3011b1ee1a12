#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "csqpt/metrics.hpp"
#include "support.hpp"

namespace csqpt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Basis rotation in the logical ordered basis, lifted to the Fock basis.
KrausSet rotated_channel(const OrderedBasis& b, const CMatrix& u_in_basis) {
  return unitary_channel(b.vectors * u_in_basis * b.vectors.adjoint());
}

TEST(ProcessFidelityKraus, Examples) {
  const FockDim dim(8);
  const BinomialCode code(dim);
  const CMatrix x = ideal_logical_x(code);
  EXPECT_NEAR(process_fidelity_kraus(unitary_channel(logical_x_extended(code)), x, code), 1.0, 1e-14);
  EXPECT_NEAR(process_fidelity_kraus(identity_channel(dim), x, code), 0.0, 1e-14);
  EXPECT_NEAR(process_fidelity_kraus(identity_channel(dim), code.projector(), code), 1.0, 1e-14);
}

TEST(StateFidelity, PureAndMixed) {
  const FockDim dim(4);
  const CMatrix a = projector(fock_state(0, dim));
  const CVector plus = (fock_state(0, dim) + fock_state(1, dim)) / std::sqrt(2.0);
  EXPECT_NEAR(state_fidelity(a, projector(plus)), 0.5, 1e-12);
  EXPECT_NEAR(state_fidelity(a, CMatrix::Identity(4, 4)), 0.25, 1e-12);
  std::mt19937_64 rng(1);
  const CMatrix rho = testing::random_density(4, rng);
  EXPECT_NEAR(state_fidelity(rho, 3.0 * rho), 1.0, 1e-10);
  EXPECT_THROW(state_fidelity(a, -a), ValidationError);
}

TEST(ProcessFidelityChoi, Examples) {
  std::mt19937_64 rng(2);
  const KrausSet c = testing::random_channel(4, 3, rng);
  EXPECT_NEAR(process_fidelity_choi(c, c), 1.0, 1e-10);

  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  const KrausSet dep({0.5 * CMatrix::Identity(2, 2), 0.5 * x, 0.5 * y, 0.5 * z});
  EXPECT_NEAR(process_fidelity_choi(identity_channel(FockDim(2)), dep), 0.25, 1e-12);
  EXPECT_THROW(process_fidelity_choi(c, identity_channel(FockDim(5))), DimensionError);
  EXPECT_THROW(process_fidelity_choi(c, c, 4), DimensionError);
}

TEST(ProcessFidelityChoi, SubspaceAgainstUnitaryReference) {
  // For a unitary reference the Choi fidelity is <u|J|u> / (Tr J <u|u>) with
  // u = vec(U P), P the projector onto the kept input levels.
  std::mt19937_64 rng(3);
  const int d = 6, cut = 2;
  const KrausSet c = testing::random_channel(d, 3, rng);
  const CMatrix u = testing::random_unitary(d, rng);
  CMatrix p = CMatrix::Zero(d, d);
  p.topLeftCorner(cut + 1, cut + 1).setIdentity();
  double overlap = 0.0, trace = 0.0;
  const CVector uv = vec(CMatrix(u * p));
  for (const auto& k : c.operators()) {
    const CVector kv = vec(CMatrix(k * p));
    overlap += std::norm(uv.dot(kv));
    trace += kv.squaredNorm();
  }
  const double expected = overlap / (trace * uv.squaredNorm());
  EXPECT_NEAR(process_fidelity_choi(c, unitary_channel(u), cut), expected, 1e-12);
}

TEST(Leakage, Examples) {
  const FockDim dim(8);
  const BinomialCode code(dim);
  EXPECT_NEAR(leakage(identity_channel(dim), code), 0.0, 1e-15);
  // |0_L> -> (|0> - |4>)/sqrt(2), |1_L> fixed.
  CMatrix perm = CMatrix::Identity(8, 8);
  perm.col(0).swap(perm.col(2));
  EXPECT_NEAR(leakage(rotated_channel(logical_ordered_basis(code, dim), perm), code), 0.5, 1e-14);
}

TEST(AvgGateFidelity, IdealAndTableGate) {
  const FockDim dim(32);
  const BinomialCode code(dim);
  const CMatrix x = ideal_logical_x(code);
  const FidelityReport ideal = avg_gate_fidelity(unitary_channel(logical_x_extended(code)), x, code);
  EXPECT_NEAR(ideal.f_avg, 1.0, 1e-14);
  EXPECT_NEAR(ideal.leakage, 0.0, 1e-14);

  const FidelityReport gate = avg_gate_fidelity(unitary_channel(compose_unitary(x_gate_sequence(), dim)), x, code);
  EXPECT_NEAR(gate.f_avg, 0.994, 0.005);
  EXPECT_NEAR(gate.f_avg, 0.9968661814, 1e-9);
  EXPECT_NEAR(gate.f_pro, 0.9965456205, 1e-9);
  EXPECT_NEAR(gate.leakage, 0.0024926967, 1e-9);
  EXPECT_NEAR(gate.f_avg, (2 * gate.f_pro + 1 - gate.leakage) / 3, 1e-15);
}

TEST(AvgGateFidelity, ClosedFormMatchesExpandedAndMonteCarlo) {
  std::mt19937_64 rng(4);
  const FockDim dim(8);
  const BinomialCode code(dim);
  const CMatrix x = ideal_logical_x(code);
  for (int trial = 0; trial < 5; ++trial) {
    const KrausSet c = testing::random_channel(8, 1 + trial % 4, rng);
    const FidelityReport r = avg_gate_fidelity(c, x, code);
    EXPECT_NEAR(r.f_avg, avg_gate_fidelity_expanded(c, x, code), 1e-12);
    for (double v : {r.f_avg, r.f_pro, r.leakage}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const MonteCarloEstimate mc = avg_gate_fidelity_monte_carlo(c, x, code, 20000, 100 + trial);
    EXPECT_EQ(mc.samples, 20000);
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_LE(std::abs(mc.mean - r.f_avg), 3.0 * mc.std_error);
  }
  EXPECT_THROW(avg_gate_fidelity_monte_carlo(identity_channel(dim), x, code, 1, 0), ValidationError);
}

TEST(AvgGateFidelity, MonteCarloIsSeeded) {
  const FockDim dim(6);
  const BinomialCode code(dim);
  std::mt19937_64 rng(5);
  const KrausSet c = testing::random_channel(6, 2, rng);
  const auto a = avg_gate_fidelity_monte_carlo(c, ideal_logical_x(code), code, 500, 9);
  const auto b = avg_gate_fidelity_monte_carlo(c, ideal_logical_x(code), code, 500, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(TruncationSweep, ReferenceIsFlat) {
  std::mt19937_64 rng(6);
  const KrausSet c = testing::random_channel(8, 2, rng);
  const auto sweep = truncation_sweep(c, c, {1, 3, 5, 7});
  ASSERT_EQ(sweep.size(), 4u);
  for (const auto& [cut, f] : sweep) EXPECT_NEAR(f, 1.0, 1e-9) << cut;
  EXPECT_EQ(sweep[2].first, 5);
  EXPECT_THROW(truncation_sweep(c, c, {3, 2}), ValidationError);
}

TEST(ErrorBudget, NoDecoherence) {
  const BinomialCode code{FockDim(16)};
  const ErrorBudget b = error_budget(x_gate_sequence(), {kInf, kInf}, code);
  ASSERT_EQ(b.entries.size(), 2u);
  for (const auto& e : b.entries) EXPECT_EQ(e.contribution, 0.0);
  EXPECT_EQ(b.all_channels_infidelity, b.baseline_infidelity);
  EXPECT_FALSE(b.scope.empty());
}

TEST(ErrorBudget, ReferenceRates) {
  const BinomialCode code{FockDim(32)};
  const ErrorBudget b = error_budget(x_gate_sequence(), kReferenceCavityTimes, code);
  EXPECT_NEAR(b.baseline_infidelity, 0.0031338185755820369, 1e-10);
  EXPECT_NEAR(b.baseline_infidelity, 1.0 - 0.994, 0.005);
  ASSERT_EQ(b.entries.size(), 2u);
  EXPECT_NEAR(b.entries[0].contribution, 0.01688154969884803, 1e-9);
  EXPECT_NEAR(b.entries[1].contribution, 0.010531477290013247, 1e-9);
  EXPECT_NEAR(b.all_channels_infidelity, 0.030305775134833124, 1e-9);
  for (const auto& e : b.entries) EXPECT_GE(e.contribution, -1e-6);
  const double sum = b.entries[0].contribution + b.entries[1].contribution;
  EXPECT_NEAR(sum, b.all_channels_infidelity - b.baseline_infidelity, 0.1 * sum);
}

TEST(Decoder, MinimalDecoderIsUnitary) {
  const BinomialCode code{FockDim(10)};
  const CMatrix d = minimal_decoder(code);
  EXPECT_EQ(d.rows(), 20);
  EXPECT_TRUE(is_unitary(d, 1e-12));
}

TEST(Decoder, IdealXDecodesToPauliDiagonal) {
  const FockDim dim(10);
  const BinomialCode code(dim);
  const DecoderStudy s = decoder_study(unitary_channel(logical_x_extended(code)), code);
  RMatrix expected = RMatrix::Zero(4, 4);
  expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
  EXPECT_LT((s.decoded.elements - expected).norm(), 1e-12);
  EXPECT_LT((s.direct.elements - expected).norm(), 1e-12);
}

TEST(Decoder, FullLeakageReturnsAncilla) {
  const FockDim dim(10);
  const BinomialCode code(dim);
  CMatrix perm = CMatrix::Identity(10, 10);
  perm.col(0).swap(perm.col(2));
  perm.col(1).swap(perm.col(3));
  const DecoderStudy s = decoder_study(rotated_channel(logical_ordered_basis(code, dim), perm), code);
  EXPECT_LT((s.decoded.elements - RMatrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_NEAR(s.direct.elements(0, 0), 0.0, 1e-12);
}

TEST(Decoder, FirstRowAlwaysTracePreserving) {
  std::mt19937_64 rng(7);
  const FockDim dim(8);
  const BinomialCode code(dim);
  for (int trial = 0; trial < 5; ++trial) {
    const DecoderStudy s = decoder_study(testing::random_channel(8, 1 + trial, rng), code);
    RVector row(4);
    row << 1.0, 0.0, 0.0, 0.0;
    EXPECT_LT((s.decoded.elements.row(0).transpose() - row).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(InjectLeakage, DirectDeficitEqualsP) {
  const FockDim dim(10);
  const BinomialCode code(dim);
  const KrausSet x = unitary_channel(logical_x_extended(code));
  for (double p : {0.0, 0.05, 0.2}) {
    const KrausSet leaky = inject_leakage(x, code, p);
    EXPECT_TRUE(leaky.certified());
    EXPECT_NEAR(1.0 - logical_ptm(leaky, code).elements(0, 0), p, 1e-12);
    EXPECT_NEAR(leakage(leaky, code), p, 1e-12);
  }
  const KrausSet to3 = inject_leakage(x, code, 0.1, 3);
  const CMatrix out = apply_channel(to3, projector(code.logical_zero));
  EXPECT_NEAR(out(3, 3).real(), 0.1, 1e-12);
  EXPECT_THROW(inject_leakage(x, code, 1.5), ValidationError);
  EXPECT_THROW(inject_leakage(x, code, 0.1, 2), ValidationError);
  EXPECT_THROW(inject_leakage(x, code, 0.1, 10), DimensionError);
}

}  // namespace
}  // namespace csqpt
