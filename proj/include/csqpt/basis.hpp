#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csqpt/gates.hpp"

namespace csqpt {

/// d orthonormal state vectors (the columns of `vectors`) with display labels.
struct OrderedBasis {
  CMatrix vectors;
  std::vector<std::string> labels;

  Index size() const { return vectors.cols(); }
  /// ||V^dagger V - I||_F.
  double orthonormality_defect() const;
};

/// |0_L>, |1_L>, (|0> - |4>)/sqrt(2), |1>, |3>, |5>, then |6>, |7>, ... in order.
OrderedBasis logical_ordered_basis(const BinomialCode& code, FockDim dim);

/// Generalized Gell-Mann operator basis over an ordered basis {|v_k>},
/// normalized so that Tr[B_i B_j] = delta_ij.
///
/// Element 0 is I/sqrt(d). The remaining d^2 - 1 traceless elements are
/// nested by level: level l (1 <= l < d) contributes, for each k < l, the
/// symmetric (|v_k><v_l| + h.c.)/sqrt(2) and antisymmetric
/// (-i|v_k><v_l| + h.c.)/sqrt(2) elements followed by the diagonal
/// (sum_{j<l} |v_j><v_j| - l |v_l><v_l|)/sqrt(l(l+1)). The first (n)^2
/// elements therefore span operators on the first n basis vectors, and
/// elements 1, 2, 3 are the logical X, Y, Z when v_0, v_1 are the code words.
class GellMannSet {
 public:
  enum class Kind { kIdentity, kSymmetric, kAntisymmetric, kDiagonal };
  struct Element {
    Kind kind;
    int k;  // lower level (diagonal: unused)
    int l;  // upper level (diagonal: the level carrying -l)
  };

  explicit GellMannSet(OrderedBasis basis);

  Index size() const { return static_cast<Index>(elements_.size()); }
  int dim() const { return static_cast<int>(basis_.size()); }
  const OrderedBasis& basis() const { return basis_; }
  const Element& element(Index i) const { return elements_[static_cast<std::size_t>(i)]; }
  const std::string& label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }

  /// Dense matrix of element i in the Fock basis.
  CMatrix matrix(Index i) const;

  /// Index of the symmetric/antisymmetric element on levels (k, l), k < l,
  /// or of the diagonal element of level l.
  static Index symmetric_index(int k, int l) { return static_cast<Index>(l) * l + 2 * k; }
  static Index antisymmetric_index(int k, int l) { return symmetric_index(k, l) + 1; }
  static Index diagonal_index(int l) { return static_cast<Index>(l) * l + 2 * l; }

  /// Coefficients c_i = Tr[B_i A] of an operator given in the Fock basis.
  RVector coefficients(const CMatrix& hermitian) const;

  /// The 21 elements coupling the code words to the first six basis vectors:
  /// I, X, Y, Z, the symmetric/antisymmetric pairs (0, l) and (1, l) for
  /// l = 2..5, and the level-2 diagonal element.
  std::vector<Index> logical_display_indices() const;

  /// Same as coefficients() for an operator already written in the ordered
  /// basis (X_ij = <v_i|A|v_j>).
  void coefficients_in_basis(const CMatrix& x, Eigen::Ref<RVector> out) const;

 private:
  OrderedBasis basis_;
  std::vector<Element> elements_;
  std::vector<std::string> labels_;
};

GellMannSet gellmann_set(OrderedBasis basis);

/// Real matrix with row/column labels; rows are outputs, columns inputs.
struct TransferMatrix {
  RMatrix elements;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

/// Lambda_ij = Tr[B_i E(B_j)] over the requested element indices (all when
/// empty), so that coefficient vectors transform as c' = Lambda c.
TransferMatrix transfer_matrix(const KrausSet& channel, const GellMannSet& gm,
                               const std::optional<std::vector<Index>>& indices = std::nullopt);

/// 4 x 4 transfer matrix over {I_L, X_L, Y_L, Z_L}/sqrt(2). Entry (0, 0) is
/// 1 - leakage, so trace loss from the code space is visible there.
TransferMatrix logical_ptm(const KrausSet& channel, const BinomialCode& code);

/// P_ij = <b_i| E(|b_j><b_j|) |b_i> for i, j < n_keep (columns are inputs).
TransferMatrix population_transfer_matrix(const KrausSet& channel, const OrderedBasis& basis, int n_keep);

}  // namespace csqpt
