#include "csqpt/basis.hpp"

#include <cmath>

namespace csqpt {

double OrderedBasis::orthonormality_defect() const {
  return (vectors.adjoint() * vectors - CMatrix::Identity(size(), size())).norm();
}

OrderedBasis logical_ordered_basis(const BinomialCode& code, FockDim dim) {
  if (dim.value() < 6) throw DimensionError("logical_ordered_basis needs dimension >= 6");
  if (code.dim != dim) throw DimensionError("logical_ordered_basis: code dimension differs");
  const Index d = dim.size();
  OrderedBasis b{CMatrix::Zero(d, d), {}};
  b.vectors.col(0) = code.logical_zero;
  b.vectors.col(1) = code.logical_one;
  b.vectors(0, 2) = M_SQRT1_2;
  b.vectors(4, 2) = -M_SQRT1_2;
  b.labels = {"0L", "1L", "E(0-4)"};
  const int remaining[] = {1, 3, 5};
  Index col = 3;
  for (int n : remaining) {
    b.vectors(n, col++) = 1.0;
    b.labels.push_back(std::to_string(n));
  }
  for (int n = 6; n < dim.value(); ++n) {
    b.vectors(n, col++) = 1.0;
    b.labels.push_back(std::to_string(n));
  }
  return b;
}

GellMannSet::GellMannSet(OrderedBasis basis) : basis_(std::move(basis)) {
  const int d = dim();
  if (d < 2) throw DimensionError("GellMannSet needs at least two basis vectors");
  if (basis_.orthonormality_defect() > 1e-10) throw ValidationError("GellMannSet: basis is not orthonormal");
  if (basis_.labels.size() != static_cast<std::size_t>(d)) {
    basis_.labels.clear();
    for (int k = 0; k < d; ++k) basis_.labels.push_back(std::to_string(k));
  }
  elements_.reserve(static_cast<std::size_t>(d) * d);
  elements_.push_back({Kind::kIdentity, 0, 0});
  labels_.push_back("I");
  const auto& bl = basis_.labels;
  for (int l = 1; l < d; ++l) {
    for (int k = 0; k < l; ++k) {
      elements_.push_back({Kind::kSymmetric, k, l});
      elements_.push_back({Kind::kAntisymmetric, k, l});
      labels_.push_back("S[" + bl[k] + "," + bl[l] + "]");
      labels_.push_back("A[" + bl[k] + "," + bl[l] + "]");
    }
    elements_.push_back({Kind::kDiagonal, 0, l});
    labels_.push_back("D[" + bl[l] + "]");
  }
  if (d >= 2) {
    labels_[1] = "X";
    labels_[2] = "Y";
    labels_[3] = "Z";
  }
}

GellMannSet gellmann_set(OrderedBasis basis) { return GellMannSet(std::move(basis)); }

CMatrix GellMannSet::matrix(Index i) const {
  const int d = dim();
  const Element& e = element(i);
  CMatrix g = CMatrix::Zero(d, d);
  switch (e.kind) {
    case Kind::kIdentity:
      g.diagonal().setConstant(1.0 / std::sqrt(static_cast<double>(d)));
      break;
    case Kind::kSymmetric:
      g(e.k, e.l) = M_SQRT1_2;
      g(e.l, e.k) = M_SQRT1_2;
      break;
    case Kind::kAntisymmetric:
      g(e.k, e.l) = -kI * M_SQRT1_2;
      g(e.l, e.k) = kI * M_SQRT1_2;
      break;
    case Kind::kDiagonal: {
      const double norm = 1.0 / std::sqrt(static_cast<double>(e.l) * (e.l + 1));
      for (int j = 0; j < e.l; ++j) g(j, j) = norm;
      g(e.l, e.l) = -e.l * norm;
      break;
    }
  }
  return basis_.vectors * g * basis_.vectors.adjoint();
}

void GellMannSet::coefficients_in_basis(const CMatrix& x, Eigen::Ref<RVector> out) const {
  const int d = dim();
  out(0) = x.trace().real() / std::sqrt(static_cast<double>(d));
  double diag_prefix = x(0, 0).real();
  for (int l = 1; l < d; ++l) {
    for (int k = 0; k < l; ++k) {
      // Tr[S X] = (X_lk + X_kl)/sqrt2, Tr[A X] = (-i X_lk + i X_kl)/sqrt2.
      out(symmetric_index(k, l)) = M_SQRT1_2 * (x(l, k) + x(k, l)).real();
      out(antisymmetric_index(k, l)) = M_SQRT1_2 * (kI * (x(k, l) - x(l, k))).real();
    }
    out(diagonal_index(l)) = (diag_prefix - l * x(l, l).real()) / std::sqrt(static_cast<double>(l) * (l + 1));
    diag_prefix += x(l, l).real();
  }
}

RVector GellMannSet::coefficients(const CMatrix& hermitian) const {
  require_dim(hermitian, FockDim(dim()), "GellMannSet::coefficients");
  RVector c(size());
  coefficients_in_basis(basis_.vectors.adjoint() * hermitian * basis_.vectors, c);
  return c;
}

std::vector<Index> GellMannSet::logical_display_indices() const {
  if (dim() < 6) throw DimensionError("logical display needs at least six basis vectors");
  std::vector<Index> idx = {0, 1, 2, 3};
  for (int l = 2; l <= 5; ++l) {
    for (int k = 0; k < 2; ++k) {
      idx.push_back(symmetric_index(k, l));
      idx.push_back(antisymmetric_index(k, l));
    }
  }
  idx.push_back(diagonal_index(2));
  return idx;
}

TransferMatrix transfer_matrix(const KrausSet& channel, const GellMannSet& gm,
                               const std::optional<std::vector<Index>>& indices) {
  const int d = gm.dim();
  if (channel.dim() != d) throw DimensionError("transfer_matrix: channel and basis dimensions differ");

  std::vector<Index> idx;
  if (indices && !indices->empty()) {
    idx = *indices;
    for (Index i : idx)
      if (i < 0 || i >= gm.size()) throw DimensionError("transfer_matrix: element index out of range");
  } else {
    idx.resize(static_cast<std::size_t>(gm.size()));
    for (Index i = 0; i < gm.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  }

  // Work in the ordered basis: K' = V^dagger K V, so E'(|k><l|) = sum_r K'_{:,k} K'_{:,l}^dagger.
  const CMatrix& v = gm.basis().vectors;
  std::vector<CMatrix> rotated;
  for (const auto& k : channel.operators()) rotated.push_back(v.adjoint() * k * v);
  auto image = [&](int k, int l) {
    CMatrix out = CMatrix::Zero(d, d);
    for (const auto& kr : rotated) out.noalias() += kr.col(k) * kr.col(l).adjoint();
    return out;
  };

  // E'(|j><j|), shared by the identity and diagonal elements.
  std::vector<CMatrix> diag_images;
  diag_images.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) diag_images.push_back(image(j, j));

  const auto n = static_cast<Index>(idx.size());
  TransferMatrix tm{RMatrix(n, n), {}, {}};
  RVector column(gm.size());
  for (Index c = 0; c < n; ++c) {
    const auto& e = gm.element(idx[static_cast<std::size_t>(c)]);
    CMatrix x;
    switch (e.kind) {
      case GellMannSet::Kind::kIdentity: {
        x = CMatrix::Zero(d, d);
        for (const auto& di : diag_images) x += di;
        x /= std::sqrt(static_cast<double>(d));
        break;
      }
      case GellMannSet::Kind::kSymmetric: {
        const CMatrix kl = image(e.k, e.l);
        x = M_SQRT1_2 * (kl + kl.adjoint());
        break;
      }
      case GellMannSet::Kind::kAntisymmetric: {
        const CMatrix kl = image(e.k, e.l);
        x = M_SQRT1_2 * (-kI * kl + kI * kl.adjoint());
        break;
      }
      case GellMannSet::Kind::kDiagonal: {
        x = -static_cast<double>(e.l) * diag_images[static_cast<std::size_t>(e.l)];
        for (int j = 0; j < e.l; ++j) x += diag_images[static_cast<std::size_t>(j)];
        x /= std::sqrt(static_cast<double>(e.l) * (e.l + 1));
        break;
      }
    }
    gm.coefficients_in_basis(x, column);
    for (Index r = 0; r < n; ++r) tm.elements(r, c) = column(idx[static_cast<std::size_t>(r)]);
  }
  for (Index i : idx) {
    tm.row_labels.push_back(gm.label(i));
    tm.col_labels.push_back(gm.label(i));
  }
  return tm;
}

TransferMatrix logical_ptm(const KrausSet& channel, const BinomialCode& code) {
  if (channel.dim() != code.dim.value()) throw DimensionError("logical_ptm: dimension mismatch");
  const CMatrix enc = code.encoder_adjoint().adjoint();  // d x 2
  const CMatrix paulis[4] = {
      CMatrix::Identity(2, 2),
      (CMatrix(2, 2) << 0, 1, 1, 0).finished(),
      (CMatrix(2, 2) << 0, -kI, kI, 0).finished(),
      (CMatrix(2, 2) << 1, 0, 0, -1).finished(),
  };
  TransferMatrix tm{RMatrix(4, 4), {"I", "X", "Y", "Z"}, {"I", "X", "Y", "Z"}};
  for (int j = 0; j < 4; ++j) {
    const CMatrix out = enc.adjoint() * apply_channel(channel, enc * paulis[j] * enc.adjoint()) * enc;
    for (int i = 0; i < 4; ++i) tm.elements(i, j) = 0.5 * trace_product(paulis[i], out).real();
  }
  return tm;
}

TransferMatrix population_transfer_matrix(const KrausSet& channel, const OrderedBasis& basis, int n_keep) {
  if (channel.dim() != basis.size()) throw DimensionError("population_transfer_matrix: dimension mismatch");
  if (n_keep < 1 || n_keep > basis.size()) throw DimensionError("population_transfer_matrix: n_keep out of range");
  TransferMatrix tm{RMatrix(n_keep, n_keep), {}, {}};
  for (int j = 0; j < n_keep; ++j) {
    const CVector bj = basis.vectors.col(j);
    const CMatrix out = apply_channel(channel, bj * bj.adjoint());
    const CMatrix proj = basis.vectors.leftCols(n_keep).adjoint() * out * basis.vectors.leftCols(n_keep);
    for (int i = 0; i < n_keep; ++i) tm.elements(i, j) = proj(i, i).real();
  }
  for (int k = 0; k < n_keep; ++k) {
    tm.row_labels.push_back(basis.labels[static_cast<std::size_t>(k)]);
    tm.col_labels.push_back(basis.labels[static_cast<std::size_t>(k)]);
  }
  return tm;
}

}  // namespace csqpt
