#pragma once

#include <variant>
#include <vector>

#include "csqpt/channel.hpp"

namespace csqpt {

/// Lowest-order binomial code: |0_L> = |2>, |1_L> = (|0> + |4>)/sqrt(2).
struct BinomialCode {
  CVector logical_zero;
  CVector logical_one;
  FockDim dim;

  explicit BinomialCode(FockDim d);

  /// I_L = |0_L><0_L| + |1_L><1_L|.
  CMatrix projector() const;
  /// The 2 x d map onto logical coordinates (rows <0_L|, <1_L|).
  CMatrix encoder_adjoint() const;
  /// c0 |0_L> + c1 |1_L>.
  CVector encode(cplx c0, cplx c1) const;
};

inline constexpr double kDisplacementDurationUs = 0.1;
inline constexpr double kSnapDurationUs = 0.7;

struct DisplaceStep {
  cplx alpha;
  double duration_us = kDisplacementDurationUs;
};

struct SnapStep {
  std::vector<double> phases;
  double duration_us = kSnapDurationUs;
};

using GateStep = std::variant<DisplaceStep, SnapStep>;

double step_duration(const GateStep& step);

/// Time-ordered list of instantaneous gates; steps.front() acts first.
struct GateSequence {
  std::vector<GateStep> steps;

  double total_duration_us() const;
  void validate() const;
};

/// The published logical X gate: four displacements interleaved with three SNAPs.
GateSequence x_gate_sequence();

/// Ordered product U = U_last ... U_first; needs dim >= the longest SNAP vector.
CMatrix compose_unitary(const GateSequence& seq, FockDim dim);

/// |0_L><1_L| + |1_L><0_L|; zero outside the code space.
CMatrix ideal_logical_x(const BinomialCode& code);

/// Logical X on the code space and identity on its complement (a unitary).
CMatrix logical_x_extended(const BinomialCode& code);

/// Superoperator of the sequence with cavity decoherence acting over each
/// step's duration, placed before the step's (instantaneous) unitary.
CMatrix noisy_gate_superoperator(const GateSequence& seq, const CoherenceTimes& times, FockDim dim);

/// Kraus form of noisy_gate_superoperator, certified CPTP.
KrausSet noisy_gate_process(const GateSequence& seq, const CoherenceTimes& times, FockDim dim);

}  // namespace csqpt
