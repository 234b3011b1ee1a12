#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "csqpt/errors.hpp"

namespace csqpt {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using CMatrix = ComplexMatrix<double>;
using CVector = ComplexVector<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

// Vectorization is column-stacking everywhere in this library:
// vec(A)[i + rows * j] = A(i, j), and vec(A X B) = (B^T (x) A) vec(X).

template <typename Derived>
ComplexVector<typename Derived::RealScalar> vec(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  ComplexMatrix<Real> tmp = m;
  return Eigen::Map<const ComplexVector<Real>>(tmp.data(), tmp.size());
}

template <typename Derived>
ComplexMatrix<typename Derived::RealScalar> unvec(const Eigen::MatrixBase<Derived>& v, Index rows) {
  using Real = typename Derived::RealScalar;
  if (rows <= 0 || v.size() % rows != 0) {
    throw DimensionError("unvec: vector length is not a multiple of the row count");
  }
  ComplexVector<Real> tmp = v;
  return Eigen::Map<const ComplexMatrix<Real>>(tmp.data(), rows, tmp.size() / rows);
}

/// Hilbert-Schmidt inner product Tr[A^dagger B].
template <typename DerivedA, typename DerivedB>
auto hs_inner(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.conjugate().cwiseProduct(b).sum();
}

/// Tr[A B] without forming the product.
template <typename DerivedA, typename DerivedB>
auto trace_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.transpose().cwiseProduct(b).sum();
}

template <typename Derived>
typename Derived::RealScalar hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).norm();
}

/// ||U^dagger U - I||_F.
double unitarity_defect(const CMatrix& u);

/// Dense matrix exponential (Pade scaling and squaring).
CMatrix expm(const CMatrix& m);

/// exp(m) for a matrix that is block diagonal up to a permutation. Independent
/// blocks are found from the exact nonzero pattern and exponentiated separately.
CMatrix expm_block_sparse(const CMatrix& m);

/// Connected components of the undirected graph with an edge (i, j) wherever
/// m(i, j) or m(j, i) is nonzero. Each component is returned sorted ascending.
std::vector<std::vector<Index>> coupled_blocks(const CMatrix& m);

/// Eigen-decomposition of a Hermitian matrix performed per coupled block.
/// Eigenvalues come back in descending order with matching eigenvector columns.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};
HermitianEigen block_hermitian_eigen(const CMatrix& m);

/// (A^dagger A)^{-1/2} for full-column-rank A; throws NumericalError otherwise.
CMatrix inverse_sqrt_gram(const CMatrix& a, double rank_tol = 1e-12);

/// Principal square root of a positive semidefinite Hermitian matrix.
CMatrix psd_sqrt(const CMatrix& m);

/// Kronecker product with the first factor on the slow index.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace csqpt
