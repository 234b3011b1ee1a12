// csqpt: simulate coherent-state process tomography data, reconstruct Kraus
// operators from it and analyze the result.
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csqpt/io.hpp"

namespace {

using namespace csqpt;

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

// Reads CLI11 configuration from a flat JSON object whose keys are long
// option names of `section` (a subcommand). Arrays become repeated values.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section = {}) : section_(std::move(section)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json out = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || name == "config" || opt->get_configurable() == false) continue;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        if (opt->get_type_size() == 0) {
          out[name] = true;
        } else if (res.size() == 1) {
          out[name] = res.front();
        } else {
          out[name] = res;
        }
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    return out.dump();
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      if (!section_.empty()) item.parents = {section_};
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  std::string section_;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": cannot parse \"" + item + "\"");
    }
  }
  if (expected > 0 && out.size() != expected) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

std::pair<int, double> parse_grid(const std::string& text, const char* what) {
  const auto v = parse_numbers(text, 2, what);
  if (v[0] < 1 || v[0] != std::floor(v[0])) throw ValidationError(std::string(what) + ": side must be a positive integer");
  return {static_cast<int>(v[0]), v[1]};
}

CoherenceTimes parse_noise(const std::string& text) {
  const auto v = parse_numbers(text, 2, "--noise");
  CoherenceTimes t{v[0], v[1]};
  t.validate();
  return t;
}

bool noiseless(const CoherenceTimes& t) { return std::isinf(t.t1_us) && std::isinf(t.t2_us); }

// "x-gate", a gate-sequence JSON file, a Kraus JSON file or a result file.
KrausSet load_channel(const std::string& spec, int dim, bool dim_given, const CoherenceTimes& noise) {
  if (spec == "x-gate") return noisy_gate_process(x_gate_sequence(), noise, FockDim(dim));
  const json j = read_json_file(spec);
  if (j.contains("steps")) return noisy_gate_process(sequence_from_json(j), noise, FockDim(dim));
  KrausSet channel = j.contains("schema") ? result_channel_from_json(j) : kraus_from_json(j);
  if (dim_given && channel.dim() != dim) {
    throw DimensionError("channel in " + spec + " has dimension " + std::to_string(channel.dim()) + ", not " +
                         std::to_string(dim));
  }
  if (!noiseless(noise)) throw ValidationError("--noise applies to gate sequences only");
  return channel;
}

GateSequence load_sequence(const std::string& spec) {
  if (spec == "x-gate") return x_gate_sequence();
  return sequence_from_json(read_json_file(spec));
}

void print_resolved(const CLI::App* sub, std::uint64_t seed) {
  std::cout << "resolved config: " << sub->config_to_str(true, false) << "\n";
  std::cout << "seed: " << seed << "\n";
}

void emit(const std::filesystem::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

void emit(const std::filesystem::path& path, const json& j) {
  write_json_file(path, j);
  std::cout << "wrote " << path.string() << "\n";
}

struct SimulateArgs {
  std::string gate = "x-gate";
  int dim = 32;
  int shots = 0;
  std::uint64_t seed = 0;
  std::string probe_grid = "5,1.5";
  std::string wigner_grid = "21,2.62";
  std::string noise = "inf,inf";
  std::string out = "dataset.json";
};

int run_simulate(const SimulateArgs& a, const CLI::App* sub) {
  print_resolved(sub, a.seed);
  const auto [np, pmax] = parse_grid(a.probe_grid, "--probe-grid");
  const auto [nw, wmax] = parse_grid(a.wigner_grid, "--wigner-grid");
  const KrausSet channel = load_channel(a.gate, a.dim, sub->count("--dim") > 0, parse_noise(a.noise));
  const auto ds = simulate_dataset(channel, ProbeGrid::square(np, pmax), WignerGrid::square(nw, wmax), a.shots, a.seed);
  emit(a.out, to_json(ds));
  std::cout << "n_probes: " << ds.probes.size() << "\nn_betas: " << ds.grid.size()
            << "\nmean |W|: " << ds.values.cwiseAbs().mean() << "\n";
  return kOk;
}

struct ReconstructArgs {
  std::string data;
  ReconstructionConfig cfg;
  std::string init = "identity-perturbed";
  std::string step_rule = "proximal";
  std::string out = "result.json";
};

ReconstructionConfig resolve(const ReconstructArgs& a) {
  ReconstructionConfig cfg = a.cfg;
  cfg.init = a.init == "random-isometry" ? InitKind::kRandomIsometry : InitKind::kIdentityPerturbed;
  cfg.step_rule = a.step_rule == "subgradient" ? StepRule::kSubgradient : StepRule::kProximal;
  cfg.validate();
  return cfg;
}

TomographyDataset load_dataset(const std::string& path) {
  TomographyDataset ds = dataset_from_json(read_json_file(path));
  if (!ds.normalized) {
    ds = normalize_dataset(ds);
    std::cout << "normalized dataset slices by their Riemann traces\n";
  }
  return ds;
}

int run_reconstruct(const ReconstructArgs& a, const CLI::App* sub) {
  const ReconstructionConfig cfg = resolve(a);
  print_resolved(sub, cfg.seed);
  const TomographyDataset ds = load_dataset(a.data);
  const auto result = reconstruct(ds, cfg);
  emit(a.out, result_to_json(cfg, result));
  const auto& r = result.report;
  std::cout << "iterations: " << r.iters_used << "\nl2: " << r.l2 << "\nl1: " << r.l1 << "\ntotal: " << r.total
            << "\ntp defect: " << result.channel.tp_defect() << "\n";
  if (!r.warning.empty()) std::cout << "warning: " << r.warning << "\n";
  return kOk;
}

struct GammaSweepArgs {
  ReconstructArgs base;
  std::vector<double> gammas;
  std::string reference;
  std::string noise = "inf,inf";
  int cut = 5;
  std::string out = "gamma_sweep.csv";
};

int run_gamma_sweep(GammaSweepArgs a, const CLI::App* sub) {
  const ReconstructionConfig base = resolve(a.base);
  print_resolved(sub, base.seed);
  const TomographyDataset ds = load_dataset(a.base.data);
  std::optional<KrausSet> reference;
  if (!a.reference.empty()) reference = load_channel(a.reference, base.dim, true, parse_noise(a.noise));
  std::ostringstream csv;
  csv.precision(std::numeric_limits<double>::max_digits10);
  csv << "gamma,l2,l1,total" << (reference ? ",f_pro" : "") << "\n";
  for (double g : a.gammas) {
    ReconstructionConfig cfg = base;
    cfg.gamma = g;
    const auto result = reconstruct(ds, cfg);
    csv << g << "," << result.report.l2 << "," << result.report.l1 << "," << result.report.total;
    if (reference) csv << "," << process_fidelity_choi(result.channel, *reference, a.cut);
    csv << "\n";
    std::cout << "gamma " << g << ": total " << result.report.total << "\n";
  }
  emit(a.out, csv.str());
  return kOk;
}

struct AnalyzeArgs {
  std::string result;
  std::string target = "x-gate";
  std::vector<std::string> emit = {"fidelity"};
  std::string reference = "x-gate";
  std::string noise = "inf,inf";
  std::vector<int> cuts = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string out_dir = ".";
};

int run_analyze(const AnalyzeArgs& a, const CLI::App* sub) {
  print_resolved(sub, 0);
  if (a.target != "x-gate") throw ValidationError("--target: only the built-in x-gate is available");
  const json j = read_json_file(a.result);
  const KrausSet channel = j.contains("schema") ? result_channel_from_json(j) : kraus_from_json(j);
  const BinomialCode code(channel.fock_dim());
  const std::filesystem::path dir(a.out_dir);
  for (const auto& what : a.emit) {
    if (what == "fidelity") {
      const auto report = avg_gate_fidelity(channel, ideal_logical_x(code), code);
      emit(dir / "fidelity.json", to_json(report));
      std::cout << "f_avg: " << report.f_avg << "\nf_pro: " << report.f_pro << "\nleakage: " << report.leakage << "\n";
    } else if (what == "ptm") {
      emit(dir / "ptm.csv", transfer_matrix_csv(logical_ptm(channel, code)));
    } else if (what == "gtm") {
      const auto gm = gellmann_set(logical_ordered_basis(code, channel.fock_dim()));
      emit(dir / "gtm.csv", transfer_matrix_csv(transfer_matrix(channel, gm, gm.logical_display_indices())));
    } else if (what == "poptm") {
      emit(dir / "poptm.csv",
           transfer_matrix_csv(population_transfer_matrix(channel, logical_ordered_basis(code, channel.fock_dim()), 6)));
    } else if (what == "sweep") {
      const KrausSet reference = load_channel(a.reference, channel.dim(), true, parse_noise(a.noise));
      emit(dir / "sweep.csv", truncation_sweep_csv(truncation_sweep(channel, reference, a.cuts)));
    } else {
      throw ValidationError("--emit: unknown output \"" + what + "\"");
    }
  }
  return kOk;
}

struct BudgetArgs {
  std::string gate = "x-gate";
  int dim = 32;
  std::string noise = "315,478";
  std::string out_dir = ".";
};

int run_budget(const BudgetArgs& a, const CLI::App* sub) {
  print_resolved(sub, 0);
  const BinomialCode code{FockDim(a.dim)};
  const auto budget = error_budget(load_sequence(a.gate), parse_noise(a.noise), code);
  const std::filesystem::path dir(a.out_dir);
  emit(dir / "budget.csv", error_budget_csv(budget));
  emit(dir / "budget.json", to_json(budget));
  std::cout << "baseline infidelity: " << budget.baseline_infidelity << "\n";
  for (const auto& e : budget.entries) {
    std::cout << e.label << ": " << e.contribution << (e.clipped ? " (clipped)" : "") << "\n";
  }
  std::cout << "all channels: " << budget.all_channels_infidelity << "\nscope: " << budget.scope << "\n";
  return kOk;
}

struct DecodeArgs {
  std::string channel = "x-gate";
  int dim = 32;
  std::string noise = "inf,inf";
  double leakage = 0.0;
  std::string out_dir = ".";
};

int run_decode_study(const DecodeArgs& a, const CLI::App* sub) {
  print_resolved(sub, 0);
  KrausSet channel = load_channel(a.channel, a.dim, sub->count("--dim") > 0, parse_noise(a.noise));
  const BinomialCode code(channel.fock_dim());
  if (a.leakage > 0.0) channel = inject_leakage(channel, code, a.leakage);
  const auto study = decoder_study(channel, code);
  const std::filesystem::path dir(a.out_dir);
  emit(dir / "decoded_ptm.csv", transfer_matrix_csv(study.decoded));
  emit(dir / "direct_ptm.csv", transfer_matrix_csv(study.direct));
  std::cout << "decoded PTM[I,I]: " << study.decoded.elements(0, 0) << "\ndirect PTM[I,I]: " << study.direct.elements(0, 0)
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-state quantum process tomography toolkit"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a Wigner tomography dataset of a gate");
  simulate->add_option("--gate", sim.gate, "x-gate, a gate-sequence JSON or a Kraus JSON")->capture_default_str();
  simulate->add_option("--dim", sim.dim, "Fock dimension")->capture_default_str()->check(CLI::Range(2, 512));
  simulate->add_option("--shots", sim.shots, "Parity shots per point (0 = exact)")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "Shot-noise seed")->capture_default_str();
  simulate->add_option("--probe-grid", sim.probe_grid, "n,alpha_max")->capture_default_str();
  simulate->add_option("--wigner-grid", sim.wigner_grid, "n,beta_max")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Cavity T1,T2 in us (inf,inf = none)")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output dataset JSON")->capture_default_str();

  ReconstructArgs rec;
  auto add_reconstruct_options = [](CLI::App* sub, ReconstructArgs& r) {
    sub->add_option("--data", r.data, "Dataset JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--rank", r.cfg.rank, "Number of Kraus operators")->capture_default_str();
    sub->add_option("--dim", r.cfg.dim, "Reconstruction dimension")->capture_default_str();
    sub->add_option("--gamma", r.cfg.gamma, "L1 weight")->capture_default_str();
    sub->add_option("--iters", r.cfg.max_iters, "Maximum iterations")->capture_default_str();
    sub->add_option("--step-size", r.cfg.step_size, "First trial step")->capture_default_str();
    sub->add_option("--grad-tol", r.cfg.grad_tol, "Stationarity tolerance")->capture_default_str();
    sub->add_option("--seed", r.cfg.seed, "Initialization seed")->capture_default_str();
    sub->add_option("--init", r.init, "identity-perturbed | random-isometry")
        ->capture_default_str()
        ->check(CLI::IsMember({"identity-perturbed", "random-isometry"}));
    sub->add_option("--step-rule", r.step_rule, "proximal | subgradient")
        ->capture_default_str()
        ->check(CLI::IsMember({"proximal", "subgradient"}));
  };
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct Kraus operators from a dataset");
  add_reconstruct_options(reconstruct_cmd, rec);
  reconstruct_cmd->add_option("--out", rec.out, "Output result JSON")->capture_default_str();

  GammaSweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("gamma-sweep", "Reconstruct for several L1 weights");
  add_reconstruct_options(sweep_cmd, sweep.base);
  sweep_cmd->add_option("--gammas", sweep.gammas, "Comma-separated L1 weights")->required()->delimiter(',');
  sweep_cmd->add_option("--reference", sweep.reference, "Channel to compare against (x-gate or JSON)");
  sweep_cmd->add_option("--noise", sweep.noise, "T1,T2 for the reference")->capture_default_str();
  sweep_cmd->add_option("--cut", sweep.cut, "Subspace cut for the fidelity")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Output CSV")->capture_default_str();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Transfer matrices, fidelities and truncation sweeps");
  analyze->add_option("--result", an.result, "Result or Kraus JSON")->required()->check(CLI::ExistingFile);
  analyze->add_option("--target", an.target, "Target gate")->capture_default_str();
  analyze->add_option("--emit", an.emit, "gtm, ptm, poptm, fidelity, sweep")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"gtm", "ptm", "poptm", "fidelity", "sweep"}));
  analyze->add_option("--reference", an.reference, "Sweep reference channel")->capture_default_str();
  analyze->add_option("--noise", an.noise, "T1,T2 for the sweep reference")->capture_default_str();
  analyze->add_option("--cuts", an.cuts, "Ascending subspace cuts for the sweep")->delimiter(',')->capture_default_str();
  analyze->add_option("--out-dir", an.out_dir, "Output directory")->capture_default_str();

  BudgetArgs bud;
  auto* budget = app.add_subcommand("budget", "Per-mechanism infidelity of a gate sequence");
  budget->add_option("--gate", bud.gate, "x-gate or a gate-sequence JSON")->capture_default_str();
  budget->add_option("--dim", bud.dim, "Fock dimension")->capture_default_str();
  budget->add_option("--noise", bud.noise, "Cavity T1,T2 in us")->capture_default_str();
  budget->add_option("--out-dir", bud.out_dir, "Output directory")->capture_default_str();

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode-study", "Compare the minimal-decoder PTM with the direct one");
  decode->add_option("--channel", dec.channel, "x-gate, sequence, Kraus or result JSON")->capture_default_str();
  decode->add_option("--dim", dec.dim, "Fock dimension")->capture_default_str();
  decode->add_option("--noise", dec.noise, "Cavity T1,T2 in us")->capture_default_str();
  decode->add_option("--leakage", dec.leakage, "Inject this much leakage after the channel")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  decode->add_option("--out-dir", dec.out_dir, "Output directory")->capture_default_str();

  // CLI11 only reads config files on the root app, so --config lives there and
  // falls through from the subcommand; keys are routed to the subcommand named
  // on the command line.
  std::string section;
  for (int i = 1; i < argc && section.empty(); ++i) {
    for (const CLI::App* sub : app.get_subcommands({})) {
      if (sub->get_name() == argv[i]) section = argv[i];
    }
  }
  for (CLI::App* sub : app.get_subcommands({})) {
    sub->config_formatter(std::make_shared<JsonConfig>());
    sub->fallthrough();
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>(section));
  app.set_config("--config", "", "JSON file with option values for the subcommand (command-line flags take precedence)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  set_warning_handler([](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; });
  std::cout.precision(std::numeric_limits<double>::max_digits10);
  try {
    if (*simulate) return run_simulate(sim, simulate);
    if (*reconstruct_cmd) return run_reconstruct(rec, reconstruct_cmd);
    if (*sweep_cmd) return run_gamma_sweep(sweep, sweep_cmd);
    if (*analyze) return run_analyze(an, analyze);
    if (*budget) return run_budget(bud, budget);
    if (*decode) return run_decode_study(dec, decode);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
