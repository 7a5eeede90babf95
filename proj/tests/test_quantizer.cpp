#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hetq/noise_model.hpp"
#include "hetq/quantizer.hpp"
#include "oracles.hpp"

namespace {

// Reference vector for the frozen search results below (values cast to float32).
const std::vector<float> kV16{0.12F, -0.53F, 0.31F, 0.07F, -0.22F, 0.95F, -0.41F, 0.18F,
                              0.66F, -0.09F, 0.27F, -0.75F, 0.44F, 0.03F, -0.36F, 0.58F};

std::vector<float> random_channel(std::mt19937& gen, std::size_t n) {
  std::normal_distribution<float> dist(0.0F, 0.05F);
  std::vector<float> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST(Quantizer, SpecRanges) {
  EXPECT_EQ(hetq::QuantizerSpec{3}.qmin(), -4);
  EXPECT_EQ(hetq::QuantizerSpec{3}.qmax(), 3);
  EXPECT_EQ(hetq::QuantizerSpec{5}.qmin(), -16);
  EXPECT_EQ(hetq::QuantizerSpec{5}.qmax(), 15);
  EXPECT_EQ(hetq::QuantizerSpec{16}.qmax(), 32767);
  EXPECT_THROW(hetq::QuantizerSpec::of(1), hetq::ConfigError);
  EXPECT_THROW(hetq::QuantizerSpec::of(17), hetq::ConfigError);
}

TEST(Quantizer, GridPointsRoundTripExactly) {
  const hetq::QuantizerSpec spec{3};
  const float s = 0.5F;
  const std::vector<float> v{-s, 0.0F, s};
  const auto codes = hetq::quantize_channel(v, s, spec);
  EXPECT_EQ(codes, (std::vector<std::int32_t>{-1, 0, 1}));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(hetq::dequantize_value(codes[i], s), v[i]);
  EXPECT_EQ(hetq::squared_error(v, s, spec), 0.0);
}

TEST(Quantizer, RoundsToNearestAndClamps) {
  const hetq::QuantizerSpec spec{3};
  EXPECT_EQ(hetq::quantize_value(0.74, 0.5, spec), 1);
  EXPECT_EQ(hetq::quantize_value(100.0, 1.0, spec), 3);
  EXPECT_EQ(hetq::quantize_value(-100.0, 1.0, spec), -4);
  // Half-way points go to the even level.
  EXPECT_EQ(hetq::quantize_value(0.5, 1.0, spec), 0);
  EXPECT_EQ(hetq::quantize_value(1.5, 1.0, spec), 2);
  EXPECT_EQ(hetq::quantize_value(-2.5, 1.0, spec), -2);
}

TEST(Quantizer, QuantizeMatchesOracle) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<float> dist(-3.0F, 3.0F);
  for (int bits = 2; bits <= 8; ++bits) {
    const hetq::QuantizerSpec spec{bits};
    for (int i = 0; i < 2000; ++i) {
      const float v = dist(gen);
      const double s = 0.01 + 0.2 * (i % 17);
      EXPECT_EQ(hetq::quantize_value(v, s, spec), oracle::quantize(v, s, bits));
    }
  }
}

TEST(Quantizer, NonPositiveScaleRejected) {
  const std::vector<float> v{1.0F};
  EXPECT_THROW(hetq::quantize_channel(v, 0.0F, hetq::QuantizerSpec{3}), hetq::ConfigError);
  EXPECT_THROW(hetq::quantize_channel(v, -1.0F, hetq::QuantizerSpec{3}), hetq::ConfigError);
}

TEST(ScaleSearch, GridIsAscendingAndBounded) {
  const hetq::QuantizerSpec spec{3};
  const auto g = hetq::scale_grid(kV16, spec, {});
  ASSERT_EQ(g.size(), 128U);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  const double base = 0.95F / 3.0;
  EXPECT_NEAR(g.front(), 0.3 * base, 1e-7);
  EXPECT_NEAR(g.back(), base, 1e-7);
  EXPECT_EQ(g, oracle::grid(kV16, 3, 128));
}

TEST(ScaleSearch, ExactGridFit) {
  const std::vector<float> v{1.0F, -2.0F, 3.0F};
  const hetq::QuantizerSpec spec{3};
  const float s = hetq::mse_optimal_scale(v, spec, {64});
  EXPECT_EQ(s, 1.0F);
  EXPECT_EQ(hetq::squared_error(v, s, spec), 0.0);
}

TEST(ScaleSearch, AllZeroReturnsSentinel) {
  const std::vector<float> zeros(8, 0.0F);
  const hetq::QuantizerSpec spec{3};
  EXPECT_EQ(hetq::mse_optimal_scale(zeros, spec), 0.0F);
  EXPECT_EQ(hetq::noise_aware_scale(zeros, spec, hetq::NoiseModel::defaults(3)), 0.0F);
  EXPECT_EQ(hetq::mse_optimal_scale(std::vector<float>{}, spec), 0.0F);
}

TEST(ScaleSearch, FrozenNoiseAwareResult) {
  const hetq::QuantizerSpec spec{3};
  const hetq::ScaleSearchConfig search{8};
  const auto noise = hetq::NoiseModel::symmetric(3, 0.05);
  const float s = hetq::noise_aware_scale(kV16, spec, noise, search);
  EXPECT_EQ(s, static_cast<float>(0.22449590265750885));
  EXPECT_NEAR(hetq::expected_distortion(kV16, s, spec, noise), 0.22415664387026935, 1e-12);

  const float s0 = hetq::mse_optimal_scale(kV16, spec, search);
  EXPECT_EQ(s0, static_cast<float>(0.3166666626930237));
  EXPECT_NEAR(hetq::squared_error(kV16, s0, spec), 0.11218889478461858, 1e-12);
  EXPECT_LE(s, s0);
}

TEST(ScaleSearch, ZeroNoiseEqualsMseSearch) {
  std::mt19937 gen(17);
  const hetq::QuantizerSpec spec{3};
  for (int i = 0; i < 30; ++i) {
    const auto v = random_channel(gen, 1 + static_cast<std::size_t>(i) * 3);
    EXPECT_EQ(hetq::noise_aware_scale(v, spec, hetq::NoiseModel::noiseless()), hetq::mse_optimal_scale(v, spec));
  }
}

TEST(ScaleSearch, MatchesExhaustiveOracle) {
  std::mt19937 gen(23);
  for (int i = 0; i < 40; ++i) {
    const int bits = 2 + i % 5;
    const int points = 2 + i % 31;
    const double p = 0.005 * (i % 7);
    const auto v = random_channel(gen, 1 + static_cast<std::size_t>(i % 64));
    const hetq::QuantizerSpec spec{bits};
    const hetq::ScaleSearchConfig search{points};
    EXPECT_EQ(hetq::noise_aware_scale(v, spec, hetq::NoiseModel::symmetric(3, p), search),
              oracle::argmin(v, bits, points, 2.0 * p));
    EXPECT_EQ(hetq::mse_optimal_scale(v, spec, search), oracle::argmin(v, bits, points, 0.0));
  }
}

TEST(ScaleSearch, NoiseShrinksScale) {
  std::mt19937 gen(29);
  const hetq::QuantizerSpec spec{3};
  for (int i = 0; i < 50; ++i) {
    const auto v = random_channel(gen, 64);
    const float s0 = hetq::mse_optimal_scale(v, spec);
    for (double p : {0.001, 0.01, 0.1, 0.3}) {
      EXPECT_LE(hetq::noise_aware_scale(v, spec, hetq::NoiseModel::symmetric(3, p)), s0);
    }
  }
}

TEST(Distortion, ClosedFormTerms) {
  const hetq::QuantizerSpec spec{3};
  const std::vector<float> v{0.5F, -0.5F, 1.0F, 0.0F};
  // Exactly representable: the noise term alone remains.
  EXPECT_EQ(hetq::expected_distortion(v, 0.5F, spec, hetq::NoiseModel::noiseless()), 0.0);
  const auto noise = hetq::NoiseModel::symmetric(3, 0.05);
  EXPECT_NEAR(hetq::expected_distortion(v, 0.5F, spec, noise), 4 * 0.1 * 0.25, 1e-15);
  EXPECT_NEAR(hetq::expected_distortion(v, 0.4F, spec, 0.0), oracle::sq_error(v, 0.4F, 3), 1e-15);
  EXPECT_THROW(hetq::expected_distortion(v, 0.0F, spec, noise), hetq::ConfigError);
}

TEST(Distortion, AsymmetricNoiseUsesTotalFlipRate) {
  const hetq::QuantizerSpec spec{3};
  const std::vector<float> v{0.3F, -0.7F, 0.1F};
  hetq::NoiseModel m;
  m.p_minus = 0.02;
  m.p_plus = 0.05;
  m.p_zero = 0.93;
  EXPECT_NEAR(hetq::expected_distortion(v, 0.25F, spec, m), oracle::noise_objective(v, 0.25F, 3, 0.07), 1e-15);
}
