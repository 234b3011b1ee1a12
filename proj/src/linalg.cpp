#include "csqpt/linalg.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace csqpt {

namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& warning_handler() {
  static WarningHandler handler = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

CMatrix gather(const CMatrix& m, const std::vector<Index>& idx) {
  const auto n = static_cast<Index>(idx.size());
  CMatrix out(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) out(r, c) = m(idx[r], idx[c]);
  return out;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  std::swap(handler, warning_handler());
  return handler;
}

void warn(const std::string& message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) throw DimensionError("unitarity_defect: matrix is not square");
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

CMatrix expm(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("expm: matrix is not square");
  return m.exp();
}

std::vector<std::vector<Index>> coupled_blocks(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("coupled_blocks: matrix is not square");
  const Index n = m.rows();
  DisjointSets sets(n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r)
      if (r != c && m(r, c) != cplx{0.0, 0.0}) sets.unite(r, c);

  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

CMatrix expm_block_sparse(const CMatrix& m) {
  const auto blocks = coupled_blocks(m);
  CMatrix out = CMatrix::Zero(m.rows(), m.cols());
  for (const auto& idx : blocks) {
    const CMatrix e = gather(m, idx).exp();
    for (std::size_t c = 0; c < idx.size(); ++c)
      for (std::size_t r = 0; r < idx.size(); ++r) out(idx[r], idx[c]) = e(r, c);
  }
  return out;
}

HermitianEigen block_hermitian_eigen(const CMatrix& m) {
  const Index n = m.rows();
  const auto blocks = coupled_blocks(m);
  std::vector<std::pair<double, CVector>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (const auto& idx : blocks) {
    const CMatrix sub = gather(m, idx);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
    for (Index k = 0; k < sub.rows(); ++k) {
      CVector v = CVector::Zero(n);
      for (std::size_t r = 0; r < idx.size(); ++r) v(idx[r]) = solver.eigenvectors()(static_cast<Index>(r), k);
      pairs.emplace_back(solver.eigenvalues()(k), std::move(v));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = pairs[k].first;
    out.vectors.col(k) = pairs[k].second;
  }
  return out;
}

CMatrix inverse_sqrt_gram(const CMatrix& a, double rank_tol) {
  const CMatrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigensolver did not converge");
  const RVector& w = solver.eigenvalues();
  if (w.size() == 0 || w.minCoeff() <= rank_tol * std::max(1.0, w.maxCoeff())) {
    throw NumericalError("matrix is rank deficient; cannot form (A^dagger A)^(-1/2)");
  }
  const RVector inv_sqrt = w.cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().adjoint();
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const RVector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace csqpt
