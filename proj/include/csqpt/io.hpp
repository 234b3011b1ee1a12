#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "csqpt/metrics.hpp"
#include "csqpt/reconstruct.hpp"

namespace csqpt {

using nlohmann::json;

inline constexpr const char* kDatasetSchema = "csqpt-dataset-v1";
inline constexpr const char* kResultSchema = "csqpt-result-v1";

// Complex numbers are [re, im] pairs; matrices are row-major.
json to_json(cplx z);
cplx complex_from_json(const json& j);

/// {"dim", "rank", "operators": [[[re, im], ...], ...]}, each operator a
/// row-major list of d*d entries.
json to_json(const KrausSet& channel);
KrausSet kraus_from_json(const json& j);

/// {"steps": [{"kind": "displace", "alpha": [re, im], "dur_us"}, {"kind": "snap", "phases": [...], "dur_us"}]}
json to_json(const GateSequence& seq);
GateSequence sequence_from_json(const json& j);

json to_json(const TomographyDataset& ds);
TomographyDataset dataset_from_json(const json& j);

json to_json(const ReconstructionConfig& cfg);
json to_json(const LossReport& report);
json result_to_json(const ReconstructionConfig& cfg, const ReconstructionResult& result);
/// Kraus set stored in a result file.
KrausSet result_channel_from_json(const json& j);

json to_json(const FidelityReport& report);
json to_json(const ErrorBudget& budget);

/// Throw DataError on I/O or parse failures.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Matrix CSV with a header row; rows are prefixed by their label when
/// row_labels is non-empty.
std::string transfer_matrix_csv(const TransferMatrix& m);
/// beta_re, beta_im, w for one probe.
std::string wigner_slice_csv(const TomographyDataset& ds, Index probe);
std::string error_budget_csv(const ErrorBudget& budget);
std::string truncation_sweep_csv(const std::vector<std::pair<int, double>>& sweep);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace csqpt
