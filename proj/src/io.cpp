#include "csqpt/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace csqpt {

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

void require_schema(const json& j, const char* schema) {
  if (!j.contains("schema") || j.at("schema") != schema) {
    throw DataError(std::string("expected schema \"") + schema + "\"");
  }
}

json points_to_json(const std::vector<cplx>& pts) {
  json out = json::array();
  for (const auto& z : pts) out.push_back(to_json(z));
  return out;
}

std::vector<cplx> points_from_json(const json& j) {
  std::vector<cplx> pts;
  for (const auto& e : j) pts.push_back(complex_from_json(e));
  return pts;
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const KrausSet& channel) {
  json ops = json::array();
  for (const auto& k : channel.operators()) {
    json flat = json::array();
    for (Index r = 0; r < k.rows(); ++r)
      for (Index c = 0; c < k.cols(); ++c) flat.push_back(to_json(k(r, c)));
    ops.push_back(std::move(flat));
  }
  return {{"dim", channel.dim()}, {"rank", channel.rank()}, {"operators", std::move(ops)}};
}

KrausSet kraus_from_json(const json& j) {
  return guarded("Kraus JSON", [&] {
    const int d = j.at("dim").get<int>();
    const int r = j.at("rank").get<int>();
    const auto& ops = j.at("operators");
    if (d < 1) throw DataError("Kraus JSON: dim must be positive");
    if (!ops.is_array() || static_cast<int>(ops.size()) != r) throw DataError("Kraus JSON: operator count != rank");
    std::vector<CMatrix> out;
    for (const auto& flat : ops) {
      if (!flat.is_array() || flat.size() != static_cast<std::size_t>(d) * d) {
        throw DataError("Kraus JSON: each operator needs dim*dim entries");
      }
      CMatrix k(d, d);
      for (int row = 0; row < d; ++row)
        for (int col = 0; col < d; ++col) k(row, col) = complex_from_json(flat[static_cast<std::size_t>(row * d + col)]);
      out.push_back(std::move(k));
    }
    return KrausSet(std::move(out));
  });
}

json to_json(const GateSequence& seq) {
  json steps = json::array();
  for (const auto& step : seq.steps) {
    if (const auto* disp = std::get_if<DisplaceStep>(&step)) {
      steps.push_back({{"kind", "displace"}, {"alpha", to_json(disp->alpha)}, {"dur_us", disp->duration_us}});
    } else {
      const auto& snap = std::get<SnapStep>(step);
      steps.push_back({{"kind", "snap"}, {"phases", snap.phases}, {"dur_us", snap.duration_us}});
    }
  }
  return {{"steps", std::move(steps)}};
}

GateSequence sequence_from_json(const json& j) {
  return guarded("gate sequence JSON", [&] {
    GateSequence seq;
    for (const auto& s : j.at("steps")) {
      const auto kind = s.at("kind").get<std::string>();
      if (kind == "displace") {
        seq.steps.emplace_back(
            DisplaceStep{complex_from_json(s.at("alpha")), s.value("dur_us", kDisplacementDurationUs)});
      } else if (kind == "snap") {
        seq.steps.emplace_back(SnapStep{s.at("phases").get<std::vector<double>>(), s.value("dur_us", kSnapDurationUs)});
      } else {
        throw DataError("gate sequence JSON: unknown step kind \"" + kind + "\"");
      }
    }
    seq.validate();
    return seq;
  });
}

json to_json(const TomographyDataset& ds) {
  json values = json::array();
  for (Index i = 0; i < ds.values.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < ds.values.cols(); ++k) row.push_back(ds.values(i, k));
    values.push_back(std::move(row));
  }
  return {{"schema", kDatasetSchema},
          {"dim", ds.dim},
          {"shots", ds.shots},
          {"seed", ds.seed},
          {"normalized", ds.normalized},
          {"probes", points_to_json(ds.probes.alphas)},
          {"betas", points_to_json(ds.grid.betas)},
          {"values", std::move(values)}};
}

TomographyDataset dataset_from_json(const json& j) {
  return guarded("dataset JSON", [&] {
    require_schema(j, kDatasetSchema);
    TomographyDataset ds;
    ds.dim = j.at("dim").get<int>();
    ds.shots = j.at("shots").get<int>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.normalized = j.at("normalized").get<bool>();
    ds.probes.alphas = points_from_json(j.at("probes"));
    ds.grid = WignerGrid::from_points(points_from_json(j.at("betas")));
    const auto& values = j.at("values");
    ds.values.resize(static_cast<Index>(values.size()), ds.grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i].size() != ds.grid.betas.size()) throw DataError("dataset JSON: ragged values array");
      for (std::size_t k = 0; k < values[i].size(); ++k) {
        ds.values(static_cast<Index>(i), static_cast<Index>(k)) = values[i][k].get<double>();
      }
    }
    ds.validate();
    return ds;
  });
}

json to_json(const ReconstructionConfig& cfg) {
  return {{"rank", cfg.rank},
          {"dim", cfg.dim},
          {"gamma", cfg.gamma},
          {"max_iters", cfg.max_iters},
          {"step_size", cfg.step_size},
          {"grad_tol", cfg.grad_tol},
          {"loss_tol", cfg.loss_tol},
          {"seed", cfg.seed},
          {"init", cfg.init == InitKind::kIdentityPerturbed ? "identity-perturbed" : "random-isometry"},
          {"init_noise", cfg.init_noise},
          {"step_rule", cfg.step_rule == StepRule::kProximal ? "proximal" : "subgradient"}};
}

json to_json(const LossReport& report) {
  json j = {{"l2", report.l2},
            {"l1", report.l1},
            {"total", report.total},
            {"grad_norm", report.grad_norm},
            {"iters_used", report.iters_used},
            {"converged", report.converged}};
  if (!report.warning.empty()) j["warning"] = report.warning;
  return j;
}

json result_to_json(const ReconstructionConfig& cfg, const ReconstructionResult& result) {
  return {{"schema", kResultSchema},
          {"config", to_json(cfg)},
          {"kraus", to_json(result.channel)},
          {"loss", to_json(result.report)},
          {"history", result.report.history},
          {"cptp", {{"tp_defect", result.channel.tp_defect()}, {"certified", result.channel.certified()}}}};
}

KrausSet result_channel_from_json(const json& j) {
  return guarded("result JSON", [&] {
    require_schema(j, kResultSchema);
    return kraus_from_json(j.at("kraus"));
  });
}

json to_json(const FidelityReport& report) {
  return {{"f_pro", report.f_pro}, {"leakage", report.leakage}, {"f_avg", report.f_avg},
          {"dim_logical", report.dim_logical}};
}

json to_json(const ErrorBudget& budget) {
  json entries = json::array();
  for (const auto& e : budget.entries) {
    entries.push_back({{"channel", e.label}, {"contribution", e.contribution}, {"raw", e.raw}, {"clipped", e.clipped}});
  }
  return {{"baseline_infidelity", budget.baseline_infidelity},
          {"all_channels_infidelity", budget.all_channels_infidelity},
          {"entries", std::move(entries)},
          {"scope", budget.scope}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(1) + "\n"); }

std::string transfer_matrix_csv(const TransferMatrix& m) {
  auto os = csv_stream();
  const bool labeled = !m.row_labels.empty();
  if (labeled) os << "out\\in,";
  for (std::size_t c = 0; c < m.col_labels.size(); ++c) os << (c ? "," : "") << m.col_labels[c];
  os << "\n";
  for (Index r = 0; r < m.elements.rows(); ++r) {
    if (labeled) os << m.row_labels[static_cast<std::size_t>(r)] << ",";
    for (Index c = 0; c < m.elements.cols(); ++c) os << (c ? "," : "") << m.elements(r, c);
    os << "\n";
  }
  return os.str();
}

std::string wigner_slice_csv(const TomographyDataset& ds, Index probe) {
  ds.validate();
  if (probe < 0 || probe >= ds.probes.size()) throw ValidationError("probe index out of range");
  auto os = csv_stream();
  os << "beta_re,beta_im,w\n";
  for (Index k = 0; k < ds.grid.size(); ++k) {
    const cplx b = ds.grid.betas[static_cast<std::size_t>(k)];
    os << b.real() << "," << b.imag() << "," << ds.values(probe, k) << "\n";
  }
  return os.str();
}

std::string error_budget_csv(const ErrorBudget& budget) {
  auto os = csv_stream();
  os << "channel,contribution\n";
  for (const auto& e : budget.entries) os << "\"" << e.label << "\"," << e.contribution << "\n";
  return os.str();
}

std::string truncation_sweep_csv(const std::vector<std::pair<int, double>>& sweep) {
  auto os = csv_stream();
  os << "cut,f_pro\n";
  for (const auto& [cut, f] : sweep) os << cut << "," << f << "\n";
  return os.str();
}

}  // namespace csqpt
