#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hetq/synthetic.hpp"
#include "hetq/tensor_store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(HETQ_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hetq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    weights_ = (dir_ / "w.qmt").string();
    hetq::store::save_qmt(weights_, hetq::synthetic_model(2, 16, 64, 7));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string config(const std::string& name) { return std::string(HETQ_CONFIG_DIR) + "/" + name; }

  fs::path dir_;
  std::string weights_;
};

}  // namespace

TEST_F(Cli, QuantizeReportsCompression) {
  const auto r = run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --rho 0.3 --seed 1");
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["total"]["compression"].get<double>(), 4.444, 0.001);
  // 307 of 1024 weights per tensor are outliers.
  EXPECT_DOUBLE_EQ(j["total"]["bits_per_weight"].get<double>(), (717.0 * 3 + 307.0 * 5) / 1024);
  EXPECT_TRUE(j["noise"]["placeholder_defaults"].get<bool>());
  const auto q = hetq::store::load_qmq(path("q.qmq"));
  ASSERT_EQ(q.size(), 2U);
  EXPECT_EQ(q[0].outlier_indices.size(), 307U);
  EXPECT_TRUE(fs::exists(path("q.qmq.manifest.json")));
}

TEST_F(Cli, QuantizeRhoZeroHasNoOutliers) {
  ASSERT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --rho 0").status, 0);
  for (const auto& q : hetq::store::load_qmq(path("q.qmq"))) {
    EXPECT_TRUE(q.outlier_indices.empty());
    EXPECT_TRUE(q.outlier_codes.empty());
  }
}

TEST_F(Cli, QuantizeLosslessSixteenBit) {
  ASSERT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") +
                " --rho 0 --inlier-bits 16 --mlc-bits 3 --noise " + config("noise_3bit.ini"))
                .status,
            0);
  const auto q = hetq::store::load_qmq(path("q.qmq"));
  EXPECT_EQ(q[0].inlier_bits, 16);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --rho 1.5").status, 2);
  EXPECT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --inlier-bits 1").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("sweep --rho 0.1,abc").status, 2);
  EXPECT_EQ(run("report --config " + path("missing.ini")).status, 2);
  EXPECT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --mlc-bits 2 --noise " +
                config("noise_3bit.ini"))
                .status,
            2);
}

TEST_F(Cli, FormatErrors) {
  {
    std::ofstream bad(path("bad.qmt"), std::ios::binary);
    bad << "XXXX0000";
  }
  EXPECT_EQ(run("quantize --in " + path("bad.qmt") + " --out " + path("q.qmq")).status, 3);
  EXPECT_EQ(run("quantize --in " + path("none.qmt") + " --out " + path("q.qmq")).status, 3);
  EXPECT_EQ(run("inject --in " + weights_ + " --out " + path("n.qmq")).status, 3);
}

TEST_F(Cli, ReportDefaultAndTwoBit) {
  const auto r = run("report");
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["report"]["external_transfer_reduction"].get<double>(), 7.62, 0.01);
  EXPECT_NEAR(j["report"]["cell_reduction"].get<double>(), 7.273, 0.01);
  const auto r2 = run("report --config " + config("mlc2.ini") + " --out " + path("r.json"));
  ASSERT_EQ(r2.status, 0);
  const auto j2 = json::parse(slurp(path("r.json")));
  EXPECT_NEAR(j2["report"]["cell_reduction"].get<double>(), 6.27, 0.01);
  EXPECT_TRUE(fs::exists(path("r.json.manifest.json")));
}

TEST_F(Cli, SweepProducesOneRowPerRho) {
  const auto r = run("sweep --in " + weights_ + " --seed 3");
  ASSERT_EQ(r.status, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("rho,mse_proxy,", 0), 0U);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST_F(Cli, DseBudgetZeroIsInfeasible) {
  EXPECT_EQ(run("dse --power-budget 0").status, 4);
  const auto r = run("dse");
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["candidates"].size(), 28U);
  EXPECT_TRUE(j["best"]["feasible"].get<bool>());
}

TEST_F(Cli, InjectIsDeterministic) {
  ASSERT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq")).status, 0);
  ASSERT_EQ(run("inject --in " + path("q.qmq") + " --out " + path("a.qmq") + " --seed 11").status, 0);
  ASSERT_EQ(run("inject --in " + path("q.qmq") + " --out " + path("b.qmq") + " --seed 11").status, 0);
  EXPECT_EQ(slurp(path("a.qmq")), slurp(path("b.qmq")));
  EXPECT_NE(slurp(path("a.qmq")), slurp(path("q.qmq")));
  ASSERT_EQ(run("inject --in " + path("q.qmq") + " --out " + path("c.qmq") + " --mode cell --mlc-bits 2 --seed 11")
                .status,
            0);
  EXPECT_EQ(run("inject --in " + path("q.qmq") + " --out " + path("d.qmq") + " --mode cell --mlc-bits 3").status, 2);
}

TEST_F(Cli, ReplayReproducesOutput) {
  ASSERT_EQ(run("quantize --in " + weights_ + " --out " + path("q.qmq") + " --rho 0.2 --seed 4").status, 0);
  const auto first = slurp(path("q.qmq"));
  const auto manifest = json::parse(slurp(path("q.qmq.manifest.json")));
  EXPECT_EQ(manifest["command"], "quantize");
  EXPECT_EQ(manifest["seed"], 4);
  fs::remove(path("q.qmq"));
  ASSERT_EQ(run("replay " + path("q.qmq.manifest.json")).status, 0);
  EXPECT_EQ(slurp(path("q.qmq")), first);
}

TEST_F(Cli, SynthWritesReadableFile) {
  ASSERT_EQ(run("synth --out " + path("s.qmt") + " --tensors 3 --rows 4 --cols 5 --seed 2").status, 0);
  const auto t = hetq::store::load_qmt(path("s.qmt"));
  ASSERT_EQ(t.size(), 3U);
  EXPECT_EQ(t[2].dims, (std::vector<std::uint64_t>{4, 5}));
}
