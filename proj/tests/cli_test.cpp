#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "csqpt/io.hpp"

namespace csqpt {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("csqpt_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the tool with `args`, returning its exit status; stdout+stderr go to `output_`.
  int run(const std::string& args) {
    const fs::path log = dir_ / "log.txt";
    const std::string cmd = std::string(CSQPT_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    output_ = read(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small noiseless x-gate dataset (dimension 12, 3x3 probes, 11x11 grid).
  void small_dataset(const std::string& name, int shots = 0) {
    ASSERT_EQ(run("simulate --dim 12 --probe-grid 3,0.8 --wigner-grid 11,2.2 --shots " + std::to_string(shots) +
                  " --seed 7 --out " + path(name)),
              0)
        << output_;
  }

  fs::path dir_;
  std::string output_;
};

TEST_F(Cli, SimulateDefaultGrids) {
  ASSERT_EQ(run("simulate --gate x-gate --shots 0 --out " + path("ideal.json")), 0) << output_;
  const TomographyDataset ds = dataset_from_json(read_json_file(path("ideal.json")));
  EXPECT_EQ(ds.values.rows(), 25);
  EXPECT_EQ(ds.values.cols(), 441);
  EXPECT_EQ(ds.probes.alphas.front(), cplx(-1.5, -1.5));
  EXPECT_EQ(ds.probes.alphas.back(), cplx(1.5, 1.5));
  EXPECT_NE(output_.find("resolved config:"), std::string::npos);
  EXPECT_NE(output_.find("seed: 0"), std::string::npos);
}

TEST_F(Cli, SimulateIsByteIdenticalForSameSeed) {
  small_dataset("a.json", 1000);
  small_dataset("b.json", 1000);
  EXPECT_EQ(read(path("a.json")), read(path("b.json")));
}

TEST_F(Cli, SimulateRejectsBadGrid) {
  EXPECT_EQ(run("simulate --probe-grid 5 --out " + path("x.json")), 2);
  EXPECT_EQ(run("simulate --dim 12 --noise 100,300 --out " + path("x.json")), 2);
  EXPECT_FALSE(fs::exists(path("x.json")));
}

TEST_F(Cli, ReconstructConvergesOnNoiselessData) {
  small_dataset("ideal.json");
  ASSERT_EQ(run("reconstruct --data " + path("ideal.json") +
                " --dim 12 --rank 1 --gamma 0 --iters 2000 --grad-tol 1e-9 --out " + path("res.json")),
            0)
      << output_;
  const json r = read_json_file(path("res.json"));
  EXPECT_EQ(r.at("schema"), kResultSchema);
  EXPECT_TRUE(r.at("cptp").at("certified").get<bool>());
  const double points = 9 * 121;
  EXPECT_LE(r.at("loss").at("l2").get<double>(), 1e-6 * points);
  EXPECT_EQ(result_channel_from_json(r).dim(), 12);
}

TEST_F(Cli, ReconstructUsageErrors) {
  EXPECT_EQ(run("reconstruct --out " + path("r.json")), 2);
  EXPECT_EQ(run("reconstruct --data " + path("missing.json")), 2);
  std::ofstream(path("junk.json")) << "{\"schema\": \"nope\"}";
  EXPECT_EQ(run("reconstruct --data " + path("junk.json") + " --out " + path("r.json")), 3);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, ReconstructReadsConfigFile) {
  small_dataset("ideal.json");
  std::ofstream(path("cfg.json")) << "{\"data\": \"" << path("ideal.json") << "\", \"dim\": 12, \"rank\": 1, "
                                  << "\"iters\": 5, \"out\": \"" << path("res.json") << "\"}";
  ASSERT_EQ(run("reconstruct --config " + path("cfg.json")), 0) << output_;
  const json r = read_json_file(path("res.json"));
  EXPECT_EQ(r.at("config").at("max_iters"), 5);
  EXPECT_EQ(r.at("config").at("rank"), 1);
  EXPECT_TRUE(r.at("loss").contains("warning"));  // iteration budget exhausted, still exit 0

  // Command-line flags override the file; unknown keys are usage errors.
  ASSERT_EQ(run("reconstruct --config " + path("cfg.json") + " --rank 2"), 0) << output_;
  EXPECT_EQ(read_json_file(path("res.json")).at("config").at("rank"), 2);
  std::ofstream(path("bad.json")) << "{\"ranks\": 2}";
  EXPECT_EQ(run("reconstruct --config " + path("bad.json") + " --data " + path("ideal.json")), 2);
}

TEST_F(Cli, GammaSweepWritesTable) {
  small_dataset("noisy.json", 500);
  ASSERT_EQ(run("gamma-sweep --data " + path("noisy.json") + " --dim 12 --rank 1 --iters 50 --gammas 0,1e-3" +
                " --reference x-gate --cut 4 --out " + path("sweep.csv")),
            0)
      << output_;
  const std::string csv = read(path("sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(Cli, AnalyzeEmitsAllOutputs) {
  const FockDim dim(12);
  const BinomialCode code(dim);
  write_json_file(path("x.json"), to_json(unitary_channel(logical_x_extended(code))));
  ASSERT_EQ(run("analyze --result " + path("x.json") + " --target x-gate --emit gtm,ptm,poptm,fidelity,sweep" +
                " --cuts 2,5 --out-dir " + path("out")),
            0)
      << output_;
  for (const char* f : {"gtm.csv", "ptm.csv", "poptm.csv", "fidelity.json", "sweep.csv"})
    EXPECT_TRUE(fs::exists(path(std::string("out/") + f))) << f;

  const json fid = read_json_file(path("out/fidelity.json"));
  EXPECT_NEAR(fid.at("f_avg").get<double>(), 1.0, 1e-12);

  std::istringstream ptm(read(path("out/ptm.csv")));
  std::string line;
  std::getline(ptm, line);  // header
  const double diag[] = {1.0, 1.0, -1.0, -1.0};
  for (int r = 0; r < 4; ++r) {
    ASSERT_TRUE(std::getline(ptm, line));
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // row label
    for (int c = 0; c < 4; ++c) {
      std::getline(cells, cell, ',');
      EXPECT_NEAR(std::stod(cell), r == c ? diag[r] : 0.0, 1e-12);
    }
  }

  const std::string pop = read(path("out/poptm.csv"));
  EXPECT_EQ(std::count(pop.begin(), pop.end(), '\n'), 7);
  EXPECT_EQ(pop.rfind("out\\in,", 0), 0u);
}

TEST_F(Cli, NoiseAppliesToGateSequencesOnly) {
  write_json_file(path("x.json"), to_json(identity_channel(FockDim(12))));
  EXPECT_EQ(run("analyze --result " + path("x.json") + " --emit sweep --reference " + path("x.json") +
                " --noise 315,478 --out-dir " + path("o")),
            2);
  EXPECT_EQ(run("analyze --result " + path("x.json") + " --emit fidelity --target y-gate --out-dir " + path("o")), 2);
}

TEST_F(Cli, BudgetWithoutDecoherence) {
  ASSERT_EQ(run("budget --dim 16 --noise inf,inf --out-dir " + path("b")), 0) << output_;
  const json b = read_json_file(path("b/budget.json"));
  for (const auto& e : b.at("entries")) EXPECT_EQ(e.at("contribution").get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("b/budget.csv")));
}

TEST_F(Cli, DecodeStudyShowsHiddenLeakage) {
  ASSERT_EQ(run("decode-study --dim 12 --leakage 0.06 --out-dir " + path("d")), 0) << output_;
  auto first_entry = [&](const std::string& file) {
    std::istringstream in(read(path("d/" + file)));
    std::string line, cell;
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream cells(line);
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    return std::stod(cell);
  };
  EXPECT_NEAR(first_entry("decoded_ptm.csv"), 1.0, 1e-10);
  EXPECT_LT(first_entry("direct_ptm.csv"), 0.95);
}

}  // namespace
}  // namespace csqpt
