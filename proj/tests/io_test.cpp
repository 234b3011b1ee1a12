#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "csqpt/io.hpp"
#include "support.hpp"

namespace csqpt {
namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("csqpt_io_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Json, Complex) {
  const json j = to_json(cplx(1.5, -0.25));
  EXPECT_EQ(j, json::array({1.5, -0.25}));
  EXPECT_EQ(complex_from_json(j), cplx(1.5, -0.25));
  EXPECT_THROW(complex_from_json(json::array({1.0})), DataError);
}

TEST(Json, KrausRoundTripIsExact) {
  std::mt19937_64 rng(1);
  const KrausSet c = testing::random_channel(4, 3, rng);
  const json j = to_json(c);
  EXPECT_EQ(j.at("dim"), 4);
  EXPECT_EQ(j.at("rank"), 3);
  // Row-major entries.
  EXPECT_EQ(complex_from_json(j.at("operators")[1][1]), c[1](0, 1));
  const KrausSet back = kraus_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.stacked(), c.stacked());

  json bad = j;
  bad["rank"] = 2;
  EXPECT_THROW(kraus_from_json(bad), DataError);
  EXPECT_THROW(kraus_from_json(json::object()), DataError);
}

TEST(Json, GateSequenceRoundTrip) {
  const GateSequence seq = x_gate_sequence();
  const GateSequence back = sequence_from_json(json::parse(to_json(seq).dump()));
  ASSERT_EQ(back.steps.size(), seq.steps.size());
  EXPECT_LT((compose_unitary(back, FockDim(12)) - compose_unitary(seq, FockDim(12))).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(back.total_duration_us(), seq.total_duration_us());

  const json unknown = {{"steps", {{{"kind", "rotate"}}}}};
  EXPECT_THROW(sequence_from_json(unknown), DataError);
  const json defaults = {{"steps", {{{"kind", "displace"}, {"alpha", {0.5, 0.0}}}}}};
  EXPECT_DOUBLE_EQ(step_duration(sequence_from_json(defaults).steps[0]), kDisplacementDurationUs);
}

TEST(Json, DatasetRoundTrip) {
  const TomographyDataset ds =
      simulate_dataset(identity_channel(FockDim(10)), ProbeGrid::square(2, 0.5), WignerGrid::square(5, 2.0), 100, 3);
  const json j = to_json(ds);
  EXPECT_EQ(j.at("schema"), kDatasetSchema);
  const TomographyDataset back = dataset_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.values, ds.values);
  EXPECT_EQ(back.probes.alphas, ds.probes.alphas);
  EXPECT_EQ(back.grid.side, 5);
  EXPECT_EQ(back.shots, 100);
  EXPECT_EQ(back.seed, 3u);
  EXPECT_TRUE(back.normalized);

  json wrong = j;
  wrong["schema"] = "something-else";
  EXPECT_THROW(dataset_from_json(wrong), DataError);
  json ragged = j;
  ragged["values"][0].erase(0);
  EXPECT_THROW(dataset_from_json(ragged), DataError);
}

TEST(Json, ResultRoundTrip) {
  std::mt19937_64 rng(2);
  ReconstructionConfig cfg;
  cfg.dim = 4;
  cfg.rank = 2;
  ReconstructionResult res{testing::random_channel(4, 2, rng), {}};
  res.report.history = {3.0, 2.0, 1.0};
  res.report.warning = "reached max_iters";
  const json j = result_to_json(cfg, res);
  EXPECT_EQ(j.at("schema"), kResultSchema);
  EXPECT_EQ(j.at("config").at("step_rule"), "proximal");
  EXPECT_EQ(j.at("loss").at("warning"), "reached max_iters");
  EXPECT_EQ(j.at("history").size(), 3u);
  EXPECT_TRUE(j.at("cptp").at("certified").get<bool>());
  EXPECT_EQ(result_channel_from_json(j).stacked(), res.channel.stacked());
  EXPECT_THROW(result_channel_from_json(to_json(res.channel)), DataError);

  res.report.warning.clear();
  EXPECT_FALSE(result_to_json(cfg, res).at("loss").contains("warning"));
}

TEST(Json, Reports) {
  const json f = to_json(FidelityReport{0.9, 0.05, 0.9166, 2});
  EXPECT_DOUBLE_EQ(f.at("f_pro").get<double>(), 0.9);
  ErrorBudget b;
  b.entries.push_back({"loss", 0.01, 0.01, false});
  const json bj = to_json(b);
  EXPECT_EQ(bj.at("entries")[0].at("channel"), "loss");
  EXPECT_TRUE(bj.contains("scope"));
}

TEST(Files, WriteReadAndErrors) {
  const auto dir = scratch_dir();
  const auto path = dir / "nested" / "x.json";
  write_json_file(path, json{{"a", 1}});
  EXPECT_EQ(read_json_file(path).at("a"), 1);
  EXPECT_THROW(read_json_file(dir / "missing.json"), DataError);
  write_text_file(dir / "broken.json", "{not json");
  EXPECT_THROW(read_json_file(dir / "broken.json"), DataError);
  std::filesystem::remove_all(dir);
}

TEST(Csv, TransferMatrixHasLabels) {
  TransferMatrix m{RMatrix::Identity(2, 2), {"I", "X"}, {"I", "X"}};
  m.elements(0, 1) = 0.125;
  EXPECT_EQ(transfer_matrix_csv(m), "out\\in,I,X\nI,1,0.125\nX,0,1\n");
}

TEST(Csv, FullPrecision) {
  const std::string s = truncation_sweep_csv({{2, 1.0 / 3.0}});
  std::istringstream in(s.substr(s.find('\n') + 1));
  std::string cut, value;
  std::getline(in, cut, ',');
  std::getline(in, value);
  EXPECT_EQ(cut, "2");
  EXPECT_EQ(std::stod(value), 1.0 / 3.0);
}

TEST(Csv, WignerSliceAndBudget) {
  const TomographyDataset ds =
      simulate_dataset(identity_channel(FockDim(6)), ProbeGrid{{0.0}}, WignerGrid::square(3, 1.0), 0, 0);
  const std::string s = wigner_slice_csv(ds, 0);
  EXPECT_EQ(s.rfind("beta_re,beta_im,w\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 10);
  EXPECT_THROW(wigner_slice_csv(ds, 1), ValidationError);

  ErrorBudget b;
  b.entries.push_back({"cavity photon loss (T1)", 0.5, 0.5, false});
  EXPECT_EQ(error_budget_csv(b), "channel,contribution\n\"cavity photon loss (T1)\",0.5\n");
}

}  // namespace
}  // namespace csqpt
