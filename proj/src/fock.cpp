#include "csqpt/fock.hpp"

#include <cmath>
#include <sstream>

namespace csqpt {

namespace {

// Unnormalized analytic amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n < d.
CVector coherent_amplitudes(cplx alpha, Index d) {
  CVector c(d);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (Index n = 1; n < d; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

}  // namespace

void require_dim(const CMatrix& m, FockDim dim, const char* what) {
  if (m.rows() != dim.size() || m.cols() != dim.size()) {
    std::ostringstream os;
    os << what << ": expected " << dim.value() << "x" << dim.value() << " matrix, got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

void require_dim(const CVector& v, FockDim dim, const char* what) {
  if (v.size() != dim.size()) {
    std::ostringstream os;
    os << what << ": expected length " << dim.value() << ", got " << v.size();
    throw DimensionError(os.str());
  }
}

CVector fock_state(int n, FockDim dim) {
  if (n < 0 || n >= dim.value()) {
    throw DimensionError("fock_state: level " + std::to_string(n) + " outside dimension " +
                         std::to_string(dim.value()));
  }
  CVector v = CVector::Zero(dim.size());
  v(n) = 1.0;
  return v;
}

double coherent_tail_probability(cplx alpha, FockDim dim) {
  return std::max(0.0, 1.0 - coherent_amplitudes(alpha, dim.size()).squaredNorm());
}

CVector coherent_state(cplx alpha, FockDim dim) {
  CVector c = coherent_amplitudes(alpha, dim.size());
  const double tail = 1.0 - c.squaredNorm();
  if (tail > kTruncationTailWarning) {
    std::ostringstream os;
    os << "coherent state alpha=" << alpha << " loses probability " << tail << " beyond Fock level "
       << dim.value() - 1;
    warn(os.str());
  }
  c.normalize();
  return c;
}

CMatrix annihilation(FockDim dim) {
  CMatrix a = CMatrix::Zero(dim.size(), dim.size());
  for (Index n = 1; n < dim.size(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix number_operator(FockDim dim) {
  CMatrix n = CMatrix::Zero(dim.size(), dim.size());
  for (Index k = 0; k < dim.size(); ++k) n(k, k) = static_cast<double>(k);
  return n;
}

CMatrix displacement(cplx alpha, FockDim dim) {
  if (alpha == cplx{0.0, 0.0}) return CMatrix::Identity(dim.size(), dim.size());
  const CMatrix a = annihilation(dim);
  const CMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
  return expm(generator);
}

CMatrix snap(std::span<const double> thetas, FockDim dim) {
  if (static_cast<Index>(thetas.size()) > dim.size()) {
    throw DimensionError("snap: " + std::to_string(thetas.size()) + " phases exceed dimension " +
                         std::to_string(dim.value()));
  }
  CMatrix s = CMatrix::Identity(dim.size(), dim.size());
  for (std::size_t n = 0; n < thetas.size(); ++n) s(n, n) = std::polar(1.0, thetas[n]);
  return s;
}

CMatrix parity(FockDim dim) {
  CMatrix p = CMatrix::Zero(dim.size(), dim.size());
  for (Index n = 0; n < dim.size(); ++n) p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return p;
}

CVector embed(const CVector& psi, FockDim to) {
  if (psi.size() > to.size()) throw DimensionError("embed: target dimension smaller than source");
  CVector out = CVector::Zero(to.size());
  out.head(psi.size()) = psi;
  return out;
}

CMatrix embed(const CMatrix& op, FockDim to) {
  if (op.rows() != op.cols()) throw DimensionError("embed: operator is not square");
  if (op.rows() > to.size()) throw DimensionError("embed: target dimension smaller than source");
  CMatrix out = CMatrix::Zero(to.size(), to.size());
  out.topLeftCorner(op.rows(), op.cols()) = op;
  return out;
}

CVector truncate(const CVector& psi, FockDim to) {
  if (psi.size() < to.size()) throw DimensionError("truncate: target dimension larger than source");
  return psi.head(to.size());
}

CMatrix truncate(const CMatrix& op, FockDim to, bool renormalize) {
  if (op.rows() != op.cols()) throw DimensionError("truncate: operator is not square");
  if (op.rows() < to.size()) throw DimensionError("truncate: target dimension larger than source");
  CMatrix out = op.topLeftCorner(to.size(), to.size());
  if (renormalize) {
    const cplx tr = out.trace();
    if (std::abs(tr) <= 0.0) throw NumericalError("truncate: cannot renormalize a zero-trace block");
    out /= tr.real();
  }
  return out;
}

double mean_photon_number(const CVector& psi) {
  double n = 0.0;
  for (Index k = 0; k < psi.size(); ++k) n += static_cast<double>(k) * std::norm(psi(k));
  return n;
}

}  // namespace csqpt
