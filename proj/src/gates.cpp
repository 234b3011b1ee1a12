#include "csqpt/gates.hpp"

#include <cmath>
#include <map>

namespace csqpt {

namespace {

// Displacement amplitudes and SNAP phase vectors of the binomial-code X gate
// (Fock levels 0..9), as published with the gate.
constexpr double kXGateAlpha1 = 0.610;
constexpr double kXGateAlpha2 = 0.612;

const std::vector<double> kXGateTheta1 = {-0.67791071, -0.09477794, -1.38876256, 0.53945346, 0.31723896,
                                          -1.30273005, 0.10376766,  2.65894245,  -1.10789012, 0.50023422};
const std::vector<double> kXGateTheta2 = {0.,         2.7514428,  1.55112927,  2.31904201,  -1.11177419,
                                          1.06874247, 0.33546735, -0.44872477, -0.77601542, -0.73785501};
const std::vector<double> kXGateTheta3 = {0.45755119,  1.03469991, -0.22172176, 1.70482232, 1.49607879,
                                          -0.12840042, 1.27637479, -2.36464223, 0.,         1.66335354};

CMatrix step_unitary(const GateStep& step, FockDim dim) {
  return std::visit(
      [&](const auto& s) -> CMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DisplaceStep>) {
          return displacement(s.alpha, dim);
        } else {
          return snap(s.phases, dim);
        }
      },
      step);
}

// U X U^dagger applied to every column of a superoperator (each column is a
// vectorized operator), i.e. (conj(U) (x) U) * S without forming the kron.
void left_multiply_unitary(CMatrix& super, const CMatrix& u) {
  const Index d = u.rows();
  for (Index c = 0; c < super.cols(); ++c) {
    Eigen::Map<CMatrix> x(super.col(c).data(), d, d);
    const CMatrix y = u * x * u.adjoint();
    x = y;
  }
}

}  // namespace

BinomialCode::BinomialCode(FockDim d)
    : logical_zero(CVector::Zero(d.size())), logical_one(CVector::Zero(d.size())), dim(d) {
  if (d.value() < 5) throw DimensionError("binomial code needs Fock levels up to |4>");
  logical_zero(2) = 1.0;
  logical_one(0) = M_SQRT1_2;
  logical_one(4) = M_SQRT1_2;
}

CMatrix BinomialCode::projector() const {
  return logical_zero * logical_zero.adjoint() + logical_one * logical_one.adjoint();
}

CMatrix BinomialCode::encoder_adjoint() const {
  CMatrix e(2, dim.size());
  e.row(0) = logical_zero.adjoint();
  e.row(1) = logical_one.adjoint();
  return e;
}

CVector BinomialCode::encode(cplx c0, cplx c1) const { return c0 * logical_zero + c1 * logical_one; }

double step_duration(const GateStep& step) {
  return std::visit([](const auto& s) { return s.duration_us; }, step);
}

double GateSequence::total_duration_us() const {
  double t = 0.0;
  for (const auto& s : steps) t += step_duration(s);
  return t;
}

void GateSequence::validate() const {
  for (const auto& s : steps) {
    if (!(step_duration(s) >= 0.0) || !std::isfinite(step_duration(s))) {
      throw ValidationError("gate step durations must be finite and non-negative");
    }
  }
}

GateSequence x_gate_sequence() {
  return GateSequence{{
      DisplaceStep{kXGateAlpha1},
      SnapStep{kXGateTheta1},
      DisplaceStep{kXGateAlpha2},
      SnapStep{kXGateTheta2},
      DisplaceStep{-kXGateAlpha2},
      SnapStep{kXGateTheta3},
      DisplaceStep{-kXGateAlpha1},
  }};
}

CMatrix compose_unitary(const GateSequence& seq, FockDim dim) {
  seq.validate();
  CMatrix u = CMatrix::Identity(dim.size(), dim.size());
  for (const auto& step : seq.steps) u = step_unitary(step, dim) * u;
  return u;
}

CMatrix ideal_logical_x(const BinomialCode& code) {
  return code.logical_zero * code.logical_one.adjoint() + code.logical_one * code.logical_zero.adjoint();
}

CMatrix logical_x_extended(const BinomialCode& code) {
  const Index d = code.dim.size();
  return CMatrix::Identity(d, d) - code.projector() + ideal_logical_x(code);
}

CMatrix noisy_gate_superoperator(const GateSequence& seq, const CoherenceTimes& times, FockDim dim) {
  seq.validate();
  times.validate();
  const Index d = dim.size();
  // Steps with equal durations share one decay propagator.
  std::map<double, CMatrix> decay;
  CMatrix total = CMatrix::Identity(d * d, d * d);
  for (const auto& step : seq.steps) {
    const double t = step_duration(step);
    auto it = decay.find(t);
    if (it == decay.end()) it = decay.emplace(t, cavity_decay_superoperator({times, t}, dim)).first;
    total = it->second * total;
    left_multiply_unitary(total, step_unitary(step, dim));
  }
  return total;
}

KrausSet noisy_gate_process(const GateSequence& seq, const CoherenceTimes& times, FockDim dim) {
  const bool noiseless = times.loss_rate() == 0.0 && times.pure_dephasing_rate() == 0.0;
  if (noiseless || seq.total_duration_us() == 0.0) return unitary_channel(compose_unitary(seq, dim));
  return choi_to_kraus(superoperator_to_choi(noisy_gate_superoperator(seq, times, dim))).certify();
}

}  // namespace csqpt
