#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hetq/error.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/tensor.hpp"

namespace hetq {

/// Signed symmetric uniform quantizer of a given bit-width.
struct QuantizerSpec {
  int bits = 3;

  static QuantizerSpec of(int bits) {
    QuantizerSpec s{bits};
    s.validate();
    return s;
  }

  std::int32_t qmin() const { return code_min(bits); }
  std::int32_t qmax() const { return code_max(bits); }

  void validate() const {
    if (bits < 2 || bits > 16) throw ConfigError("quantizer bit-width must lie in [2,16], got " + std::to_string(bits));
  }
};

/// Candidate scales form a geometric grid over
/// [alpha_lo, alpha_hi] * max|w| / qmax.
struct ScaleSearchConfig {
  int grid_points = 128;
  double alpha_lo = 0.3;
  double alpha_hi = 1.0;

  void validate() const {
    if (grid_points < 2) throw ConfigError("scale grid needs at least 2 points");
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi <= 1.0)) {
      throw ConfigError("scale grid range must satisfy 0 < alpha_lo < alpha_hi <= 1");
    }
  }
};

inline std::int32_t quantize_value(double v, double scale, const QuantizerSpec& spec) {
  // nearbyint under the default rounding mode rounds half to even.
  const double r = std::nearbyint(v / scale);
  return static_cast<std::int32_t>(std::clamp(r, static_cast<double>(spec.qmin()), static_cast<double>(spec.qmax())));
}

inline std::vector<std::int32_t> quantize_channel(std::span<const float> values, float scale,
                                                  const QuantizerSpec& spec) {
  if (!(scale > 0.0F)) throw ConfigError("quantize_channel: scale must be positive");
  std::vector<std::int32_t> codes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) codes[i] = quantize_value(values[i], scale, spec);
  return codes;
}

inline float dequantize_value(std::int32_t code, float scale) { return static_cast<float>(code) * scale; }

/// ||v - Q(v; s)||^2, accumulated in double.
inline double squared_error(std::span<const float> values, float scale, const QuantizerSpec& spec) {
  if (scale == 0.0F) {
    double acc = 0.0;
    for (float v : values) acc += static_cast<double>(v) * v;
    return acc;
  }
  double acc = 0.0;
  for (float v : values) {
    const double d = static_cast<double>(v) - static_cast<double>(quantize_value(v, scale, spec)) * scale;
    acc += d * d;
  }
  return acc;
}

/// Closed-form expected distortion under ±step read noise with Δ(s) = s:
/// ||v - Q(v;s)||^2 + n (p_- + p_+) s^2.
inline double expected_distortion(std::span<const float> values, float scale, const QuantizerSpec& spec,
                                  double flip_probability) {
  const double s = scale;
  return squared_error(values, scale, spec) + static_cast<double>(values.size()) * flip_probability * s * s;
}

inline double expected_distortion(std::span<const float> values, float scale, const QuantizerSpec& spec,
                                  const NoiseModel& noise) {
  if (!(scale > 0.0F)) throw ConfigError("expected_distortion: scale must be positive");
  noise.validate();
  return expected_distortion(values, scale, spec, noise.flip_probability());
}

inline double max_abs(std::span<const float> values) {
  double m = 0.0;
  for (float v : values) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

/// Ascending candidate scales, each exactly representable as float. Empty
/// when every value is zero.
inline std::vector<float> scale_grid(std::span<const float> values, const QuantizerSpec& spec,
                                     const ScaleSearchConfig& search) {
  search.validate();
  const double peak = max_abs(values);
  if (peak == 0.0) return {};
  const double base = peak / spec.qmax();
  const double ratio = search.alpha_hi / search.alpha_lo;
  std::vector<float> grid(static_cast<std::size_t>(search.grid_points));
  for (int k = 0; k < search.grid_points; ++k) {
    const double t = static_cast<double>(k) / (search.grid_points - 1);
    grid[static_cast<std::size_t>(k)] = static_cast<float>(base * search.alpha_lo * std::pow(ratio, t));
  }
  return grid;
}

namespace detail {

/// First (smallest) grid point attaining the minimum objective.
template <typename Objective>
float grid_argmin(const std::vector<float>& grid, Objective&& objective) {
  float best = 0.0F;
  double best_val = std::numeric_limits<double>::infinity();
  for (float s : grid) {
    const double v = objective(s);
    if (v < best_val) {
      best_val = v;
      best = s;
    }
  }
  return best;
}

}  // namespace detail

/// Grid minimizer of plain reconstruction error. Returns 0 for an all-zero
/// (or empty) input.
inline float mse_optimal_scale(std::span<const float> values, const QuantizerSpec& spec,
                               const ScaleSearchConfig& search = {}) {
  spec.validate();
  return detail::grid_argmin(scale_grid(values, spec, search),
                             [&](float s) { return squared_error(values, s, spec); });
}

/// Grid minimizer of the noise-aware expected distortion.
inline float noise_aware_scale(std::span<const float> values, const QuantizerSpec& spec, const NoiseModel& noise,
                               const ScaleSearchConfig& search = {}) {
  spec.validate();
  noise.validate();
  const double q = noise.flip_probability();
  return detail::grid_argmin(scale_grid(values, spec, search),
                             [&](float s) { return expected_distortion(values, s, spec, q); });
}

}  // namespace hetq
