#include <gtest/gtest.h>

#include <random>

#include "csqpt/linalg.hpp"
#include "support.hpp"

namespace csqpt {
namespace {

TEST(Vec, ColumnStackingRoundTrip) {
  CMatrix a(2, 3);
  a << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  const CVector v = vec(a);
  EXPECT_EQ(v(1), cplx(4.0));
  EXPECT_EQ(v(2), cplx(2.0));
  EXPECT_EQ(unvec(v, 2), a);
  EXPECT_THROW(unvec(v, 4), DimensionError);
}

TEST(Vec, KroneckerIdentity) {
  std::mt19937_64 rng(1);
  const CMatrix a = testing::gaussian_matrix(3, 3, rng);
  const CMatrix x = testing::gaussian_matrix(3, 3, rng);
  const CMatrix b = testing::gaussian_matrix(3, 3, rng);
  const CVector lhs = vec(a * x * b);
  const CVector rhs = kron(b.transpose(), a) * vec(x);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(Kron, FirstFactorIsSlow) {
  CMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const CMatrix k = kron(a, b);
  EXPECT_EQ(k(0, 1), cplx(1.0));
  EXPECT_EQ(k(2, 1), cplx(3.0));
  EXPECT_EQ(k(3, 2), cplx(4.0));
}

TEST(Trace, HsInnerAndTraceProduct) {
  std::mt19937_64 rng(2);
  const CMatrix a = testing::gaussian_matrix(4, 4, rng);
  const CMatrix b = testing::gaussian_matrix(4, 4, rng);
  EXPECT_LT(std::abs(hs_inner(a, b) - (a.adjoint() * b).trace()), 1e-12);
  EXPECT_LT(std::abs(trace_product(a, b) - (a * b).trace()), 1e-12);
}

TEST(Expm, DiagonalAndNilpotent) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = kI * 0.5;
  const CMatrix e = expm(d);
  EXPECT_NEAR(std::abs(e(0, 0) - std::exp(1.0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(e(1, 1) - std::exp(kI * 0.5)), 0.0, 1e-14);

  CMatrix n = CMatrix::Zero(3, 3);
  n(0, 1) = 2.0;
  n(1, 2) = 3.0;
  const CMatrix en = expm(n);
  EXPECT_NEAR(std::abs(en(0, 2) - 3.0), 0.0, 1e-13);  // 2*3/2
  EXPECT_THROW(expm(CMatrix::Zero(2, 3)), DimensionError);
}

TEST(Expm, BlockSparseMatchesDense) {
  std::mt19937_64 rng(3);
  // Two coupled blocks {0, 2, 5} and {1, 3}, plus the isolated index 4.
  CMatrix m = CMatrix::Zero(6, 6);
  const CMatrix g = testing::gaussian_matrix(6, 6, rng);
  for (int i : {0, 2, 5})
    for (int j : {0, 2, 5}) m(i, j) = g(i, j);
  for (int i : {1, 3})
    for (int j : {1, 3}) m(i, j) = g(i, j);
  m(4, 4) = g(4, 4);
  const auto blocks = coupled_blocks(m);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0], (std::vector<Index>{0, 2, 5}));
  EXPECT_EQ(blocks[1], (std::vector<Index>{1, 3}));
  EXPECT_EQ(blocks[2], (std::vector<Index>{4}));
  EXPECT_LT((expm_block_sparse(m) - expm(m)).norm(), 1e-11);
}

TEST(HermitianEigen, BlockwiseMatchesDense) {
  std::mt19937_64 rng(4);
  CMatrix h = CMatrix::Zero(5, 5);
  const CMatrix a = testing::random_hermitian(3, rng);
  const CMatrix b = testing::random_hermitian(2, rng);
  const int ia[] = {0, 3, 4}, ib[] = {1, 2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(ia[i], ia[j]) = a(i, j);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h(ib[i], ib[j]) = b(i, j);
  const HermitianEigen eig = block_hermitian_eigen(h);
  for (Index k = 1; k < eig.values.size(); ++k) EXPECT_GE(eig.values(k - 1), eig.values(k));
  const CMatrix rebuilt = eig.vectors * eig.values.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  EXPECT_LT((rebuilt - h).norm(), 1e-12);
  EXPECT_LT((eig.vectors.adjoint() * eig.vectors - CMatrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(InverseSqrtGram, IsometryAndRankDeficiency) {
  std::mt19937_64 rng(5);
  const CMatrix a = testing::gaussian_matrix(8, 3, rng);
  const CMatrix q = a * inverse_sqrt_gram(a);
  EXPECT_LT((q.adjoint() * q - CMatrix::Identity(3, 3)).norm(), 1e-12);
  CMatrix deficient = a;
  deficient.col(2) = deficient.col(0);
  EXPECT_THROW(inverse_sqrt_gram(deficient), NumericalError);
}

TEST(PsdSqrt, SquaresBack) {
  std::mt19937_64 rng(6);
  const CMatrix rho = testing::random_density(5, rng);
  const CMatrix s = psd_sqrt(rho);
  EXPECT_LT((s * s - rho).norm(), 1e-12);
  EXPECT_LT(hermiticity_defect(s), 1e-12);
}

TEST(UnitarityDefect, DetectsNonUnitary) {
  std::mt19937_64 rng(7);
  EXPECT_LT(unitarity_defect(testing::random_unitary(6, rng)), 1e-12);
  EXPECT_NEAR(unitarity_defect(2.0 * CMatrix::Identity(2, 2)), std::sqrt(18.0), 1e-12);
}

}  // namespace
}  // namespace csqpt
