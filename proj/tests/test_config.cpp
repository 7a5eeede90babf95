#include <gtest/gtest.h>

#include <sstream>

#include "hetq/config_io.hpp"
#include "hetq/memsys.hpp"

namespace cfgio = hetq::config;

namespace {

const char* kModel = R"([model]
param_count = 1e9
rho = 0.25
inlier_bits = 3
outlier_bits = 5
mlc_bits = 3
)";

hetq::memsys::SystemConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cfgio::parse_system_config(in);
}

hetq::NoiseModel parse_noise(const std::string& text) {
  std::istringstream in(text);
  return cfgio::parse_noise_model(in);
}

}  // namespace

TEST(SystemConfig, ModelOnlyUsesDeviceDefaults) {
  const auto cfg = parse(kModel);
  EXPECT_EQ(cfg.param_count, 1e9);
  EXPECT_EQ(cfg.rho, 0.25);
  EXPECT_EQ(cfg.mram.bandwidth_gib_s, 36.57);
  EXPECT_EQ(cfg.reram.read_energy_pj_per_bit, 1.56);
  EXPECT_EQ(cfg.lpddr5.density_mb_per_mm2, 209.9);
  EXPECT_EQ(cfg.mram_channels, 4);
}

TEST(SystemConfig, OverridesAndLists) {
  const auto cfg = parse(std::string(kModel) +
                         "[system]\npower_budget_mw = 1234\nt_sync_cycles = 2\n"
                         "[reram]\nread_latency_ns = 0\n"
                         "[dse]\nmram_channels = 1, 2,8\nreram_arrays = 10\n");
  EXPECT_EQ(cfg.power_budget_mw, 1234.0);
  EXPECT_EQ(cfg.t_sync_cycles, 2);
  EXPECT_EQ(cfg.reram.read_latency_ns, 0.0);
  EXPECT_EQ(cfg.dse_mram_channels, (std::vector<int>{1, 2, 8}));
  EXPECT_EQ(cfg.dse_reram_arrays, (std::vector<int>{10}));
}

TEST(SystemConfig, MissingModelKey) {
  EXPECT_THROW(parse("[model]\nparam_count = 1\nrho = 0.3\ninlier_bits = 3\noutlier_bits = 5\n"),
               hetq::ConfigError);
}

TEST(SystemConfig, UnknownKeyOrSection) {
  EXPECT_THROW(parse(std::string(kModel) + "[system]\nmram_chanels = 3\n"), hetq::ConfigError);
  EXPECT_THROW(parse(std::string(kModel) + "[flash]\nsize = 3\n"), hetq::ConfigError);
  EXPECT_THROW(parse("stray = 1\n" + std::string(kModel)), hetq::ConfigError);
}

TEST(SystemConfig, BadValues) {
  EXPECT_THROW(parse(std::string(kModel) + "[system]\nreram_arrays = lots\n"), hetq::ConfigError);
  EXPECT_THROW(parse(std::string(kModel) + "[system]\nt_sync_cycles = 7\n"), hetq::ConfigError);
  EXPECT_THROW(parse(std::string(kModel) + "[mram]\nbandwidth_gib_s = 0\n"), hetq::ConfigError);
  EXPECT_THROW(parse(std::string(kModel) + "[dse]\nreram_arrays = 1,x\n"), hetq::ConfigError);
  EXPECT_THROW(parse("[model]\nparam_count = 1\nrho = 2\ninlier_bits = 3\noutlier_bits = 5\nmlc_bits = 3\n"),
               hetq::ConfigError);
  EXPECT_THROW(parse("[model\nrho = 1\n"), hetq::ConfigError);
}

TEST(SystemConfig, MissingFile) {
  EXPECT_THROW(cfgio::load_system_config("/nonexistent/hetq.ini"), hetq::ConfigError);
}

TEST(NoiseConfig, AdjacentStateWithDerivedZero) {
  const auto m = parse_noise("mlc_bits = 3\np_minus = 0.01\np_plus = 0.02\nseed = 9\n");
  EXPECT_EQ(m.mlc_bits, 3);
  EXPECT_DOUBLE_EQ(m.p_zero, 0.97);
  EXPECT_EQ(m.seed, 9U);
  EXPECT_FALSE(m.confusion.has_value());
  EXPECT_FALSE(m.placeholder);
}

TEST(NoiseConfig, ConfusionMatrix) {
  const auto m = parse_noise(
      "mlc_bits = 2\np_minus = 0\np_plus = 0\n[confusion]\nrow0 = 1 0 0 0\nrow1 = 0.1 0.9 0 0\n"
      "row2 = 0 0 1 0\nrow3 = 0 0 0.5 0.5\n");
  ASSERT_TRUE(m.confusion.has_value());
  EXPECT_EQ((*m.confusion)[1], (std::vector<double>{0.1, 0.9, 0.0, 0.0}));
  EXPECT_EQ(m.transition_matrix()[3][2], 0.5);
}

TEST(NoiseConfig, Errors) {
  EXPECT_THROW(parse_noise("mlc_bits = 3\np_minus = 0.01\n"), hetq::ConfigError);
  EXPECT_THROW(parse_noise("mlc_bits = 3\np_minus = 0.6\np_plus = 0.6\n"), hetq::ConfigError);
  EXPECT_THROW(parse_noise("mlc_bits = 3\np_minus = 0\np_plus = 0\nbogus = 1\n"), hetq::ConfigError);
  EXPECT_THROW(parse_noise("mlc_bits = 2\np_minus = 0\np_plus = 0\n[confusion]\nrow0 = 1 0 0 0\n"),
               hetq::ConfigError);
  EXPECT_THROW(parse_noise("mlc_bits = 2\np_minus = 0\np_plus = 0\n[confusion]\nrow0 = 1 0 0\nrow1 = 0 1 0 0\n"
                           "row2 = 0 0 1 0\nrow3 = 0 0 0 1\n"),
               hetq::ConfigError);
  EXPECT_THROW(parse_noise("mlc_bits = 2\np_minus = 0\np_plus = 0\n[confusion]\nrow0 = 1 0 0 0\nrow1 = 0 1 0 0\n"
                           "row2 = 0 0 1 0\nrow4 = 0 0 0 1\n"),
               hetq::ConfigError);
}

TEST(ShippedConfigs, ParseAndReproduceRatios) {
  const std::string dir = HETQ_CONFIG_DIR;
  const auto def = cfgio::load_system_config(dir + "/default.ini");
  const auto r = hetq::memsys::cost_report(def);
  EXPECT_NEAR(r.compression_ratio, 4.444, 0.001);
  EXPECT_NEAR(r.external_transfer_reduction, 7.619, 0.01);
  const auto r2 = hetq::memsys::cost_report(cfgio::load_system_config(dir + "/mlc2.ini"));
  EXPECT_NEAR(r2.cell_reduction, 6.275, 0.01);
  const auto rb = hetq::memsys::cost_report(cfgio::load_system_config(dir + "/fp16_baseline.ini"));
  EXPECT_DOUBLE_EQ(rb.energy_reduction, 1.0);
  EXPECT_NEAR(rb.latency_reduction, 1.0, 1e-6);
  EXPECT_NO_THROW(cfgio::load_noise_model(dir + "/noise_3bit.ini"));
  const auto c = cfgio::load_noise_model(dir + "/noise_2bit_confusion.ini");
  EXPECT_TRUE(c.confusion.has_value());
}
