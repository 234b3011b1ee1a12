#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csqpt/basis.hpp"

namespace csqpt {

/// Gate fidelity summary for a logical qubit (d = 2).
struct FidelityReport {
  double f_pro = 0.0;
  double leakage = 0.0;
  double f_avg = 0.0;
  int dim_logical = 2;
};

/// sum_i |Tr[U^dagger K_i]|^2 / 4 for the logical partial isometry U.
double process_fidelity_kraus(const KrausSet& channel, const CMatrix& u, const BinomialCode& code);

/// Uhlmann fidelity (Tr sqrt(sqrt(A) B sqrt(A)))^2 of two PSD matrices after
/// normalizing each to unit trace.
double state_fidelity(const CMatrix& a, const CMatrix& b);

/// Fidelity of the trace-normalized Choi matrices. With `subspace_cut` both
/// channels' inputs are restricted to Fock levels 0..cut before normalizing.
double process_fidelity_choi(const KrausSet& a, const KrausSet& b, std::optional<int> subspace_cut = std::nullopt);

/// 1 - Tr[I_L E(I_L / 2)].
double leakage(const KrausSet& channel, const BinomialCode& code);

/// f_avg = (2 f_pro + 1 - leakage) / 3. Also evaluates the unsimplified
/// (sum_i |Tr U^dagger K_i|^2 + sum_i Tr[U^dagger K_i I_L K_i^dagger U]) / 6
/// and throws NumericalError if the two differ by more than 1e-12.
FidelityReport avg_gate_fidelity(const KrausSet& channel, const CMatrix& u, const BinomialCode& code);

/// The unsimplified expression above on its own.
double avg_gate_fidelity_expanded(const KrausSet& channel, const CMatrix& u, const BinomialCode& code);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int samples = 0;
};

/// Average of <psi|U^dagger E(|psi><psi|) U|psi> over Haar-random logical states.
MonteCarloEstimate avg_gate_fidelity_monte_carlo(const KrausSet& channel, const CMatrix& u, const BinomialCode& code,
                                                 int samples, std::uint64_t seed);

/// (cut, process_fidelity_choi(channel, reference, cut)) for each cut.
std::vector<std::pair<int, double>> truncation_sweep(const KrausSet& channel, const KrausSet& reference,
                                                     const std::vector<int>& cuts);

struct ErrorBudgetEntry {
  std::string label;
  double contribution = 0.0;
  double raw = 0.0;      // before clipping
  bool clipped = false;  // a small negative value from non-additivity was set to 0
};

struct ErrorBudget {
  double baseline_infidelity = 0.0;      // decoherence-free
  double all_channels_infidelity = 0.0;  // every modeled mechanism on at once
  std::vector<ErrorBudgetEntry> entries;
  std::string scope = "cavity channels only (photon loss, pure dephasing); qubit channels not modeled";
};

/// Infidelity contribution of each cavity decoherence mechanism acting alone,
/// relative to the decoherence-free gate.
ErrorBudget error_budget(const GateSequence& seq, const CoherenceTimes& times, const BinomialCode& code);

struct DecoderStudy {
  TransferMatrix decoded;  // ancilla tomography after the minimal decoder
  TransferMatrix direct;   // logical_ptm of the channel
};

/// Minimal swap decoder on ancilla (x) cavity acting on the channel outputs
/// of the six logical cardinal states, each paired with the ancilla prepared
/// in the matching Pauli eigenstate; the cavity is traced out and the
/// 4 x 4 ancilla transfer matrix assembled from the six outputs.
DecoderStudy decoder_study(const KrausSet& channel, const BinomialCode& code);

/// The channel followed by a leakage map that moves a fraction p of the
/// code-space population to `error_level` (a Fock level outside the code):
/// K_0 = sqrt(1-p) I_L + (I - I_L), K_1 = sqrt(p)|e><0_L|, K_2 = sqrt(p)|e><1_L|.
KrausSet inject_leakage(const KrausSet& channel, const BinomialCode& code, double p, int error_level = 1);

/// The decoder unitary on the 2d-dimensional ancilla (x) cavity space
/// (ancilla index slow, |g> = 0, |e> = 1).
CMatrix minimal_decoder(const BinomialCode& code);

}  // namespace csqpt
