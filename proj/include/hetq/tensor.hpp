#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "hetq/error.hpp"

namespace hetq {

inline std::size_t element_count(const std::vector<std::uint64_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, std::uint64_t d) { return acc * static_cast<std::size_t>(d); });
}

/// Row-major view of a tensor as [outer, channels, inner] around its channel axis.
struct ChannelLayout {
  std::size_t outer = 1;
  std::size_t channels = 1;
  std::size_t inner = 1;

  static ChannelLayout of(const std::vector<std::uint64_t>& dims, std::size_t channel_axis) {
    ChannelLayout l;
    for (std::size_t a = 0; a < dims.size(); ++a) {
      const auto d = static_cast<std::size_t>(dims[a]);
      if (a < channel_axis) {
        l.outer *= d;
      } else if (a == channel_axis) {
        l.channels = d;
      } else {
        l.inner *= d;
      }
    }
    return l;
  }

  std::size_t size() const { return outer * channels * inner; }

  std::size_t channel_of(std::size_t flat) const { return (flat / inner) % channels; }

  /// Flat indices belonging to channel `c`, ascending.
  std::vector<std::size_t> indices_of(std::size_t c) const {
    std::vector<std::size_t> out;
    out.reserve(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = (o * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) out.push_back(base + i);
    }
    return out;
  }
};

inline void validate_shape(const std::string& name, const std::vector<std::uint64_t>& dims,
                           std::size_t channel_axis) {
  if (dims.empty()) throw ValidationError("tensor '" + name + "': needs at least one dimension");
  if (dims.size() > 255) throw ValidationError("tensor '" + name + "': too many dimensions");
  for (auto d : dims) {
    if (d == 0) throw ValidationError("tensor '" + name + "': zero-sized dimension");
  }
  if (channel_axis >= dims.size()) {
    throw ValidationError("tensor '" + name + "': channel_axis " + std::to_string(channel_axis) +
                          " out of range for rank " + std::to_string(dims.size()));
  }
}

/// Named f32 tensor with a designated per-channel axis.
struct WeightTensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::size_t channel_axis = 0;
  std::vector<float> data;

  std::size_t size() const { return data.size(); }
  ChannelLayout layout() const { return ChannelLayout::of(dims, channel_axis); }

  void validate() const {
    validate_shape(name, dims, channel_axis);
    if (element_count(dims) != data.size()) {
      throw ValidationError("tensor '" + name + "': dims describe " + std::to_string(element_count(dims)) +
                            " elements but data holds " + std::to_string(data.size()));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!std::isfinite(data[i])) {
        throw ValidationError("tensor '" + name + "': non-finite value at index " + std::to_string(i));
      }
    }
  }

  friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

/// Dual-precision quantized tensor. Codes are kept unpacked in memory; the
/// container format bit-packs them.
struct QuantizedTensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::size_t channel_axis = 0;
  int inlier_bits = 3;
  int outlier_bits = 5;
  float rho = 0.0F;
  std::vector<float> inlier_scales;
  std::vector<float> outlier_scales;
  std::vector<std::uint64_t> outlier_indices;
  std::vector<std::int32_t> inlier_codes;   // ascending flat order over non-outlier positions
  std::vector<std::int32_t> outlier_codes;  // parallel to outlier_indices

  std::size_t size() const { return element_count(dims); }
  ChannelLayout layout() const { return ChannelLayout::of(dims, channel_axis); }

  void validate() const;

  friend bool operator==(const QuantizedTensor&, const QuantizedTensor&) = default;
};

inline std::int32_t code_min(int bits) { return -(std::int32_t{1} << (bits - 1)); }
inline std::int32_t code_max(int bits) { return (std::int32_t{1} << (bits - 1)) - 1; }

inline void QuantizedTensor::validate() const {
  validate_shape(name, dims, channel_axis);
  const auto fail = [&](const std::string& what) { throw ValidationError("quantized tensor '" + name + "': " + what); };
  for (int b : {inlier_bits, outlier_bits}) {
    if (b < 2 || b > 16) fail("bit-width " + std::to_string(b) + " outside [2,16]");
  }
  if (!(rho >= 0.0F && rho <= 1.0F)) fail("rho outside [0,1]");
  const std::size_t n = size();
  const auto lay = layout();
  if (inlier_scales.size() != lay.channels || outlier_scales.size() != lay.channels) {
    fail("scale arrays must hold one entry per channel");
  }
  for (std::size_t i = 0; i < outlier_indices.size(); ++i) {
    if (outlier_indices[i] >= n) fail("outlier index " + std::to_string(outlier_indices[i]) + " out of range");
    if (i > 0 && outlier_indices[i] <= outlier_indices[i - 1]) fail("outlier indices not strictly increasing");
  }
  const double expected = static_cast<double>(rho) * static_cast<double>(n);
  if (std::abs(static_cast<double>(outlier_indices.size()) - expected) > 0.5 + 1e-6 * static_cast<double>(n)) {
    fail("outlier count " + std::to_string(outlier_indices.size()) + " inconsistent with rho");
  }
  if (outlier_codes.size() != outlier_indices.size()) fail("outlier code count mismatch");
  if (inlier_codes.size() != n - outlier_indices.size()) fail("inlier code count mismatch");
  for (auto c : inlier_codes) {
    if (c < code_min(inlier_bits) || c > code_max(inlier_bits)) fail("inlier code out of range");
  }
  for (auto c : outlier_codes) {
    if (c < code_min(outlier_bits) || c > code_max(outlier_bits)) fail("outlier code out of range");
  }
  for (const auto* scales : {&inlier_scales, &outlier_scales}) {
    for (float s : *scales) {
      if (!std::isfinite(s) || s < 0.0F) fail("scales must be finite and non-negative");
    }
  }
  // A zero scale is only allowed where every code it governs is zero.
  std::size_t next_out = 0;
  std::size_t in_pos = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    const std::size_t c = lay.channel_of(flat);
    if (next_out < outlier_indices.size() && outlier_indices[next_out] == flat) {
      if (outlier_scales[c] == 0.0F && outlier_codes[next_out] != 0) fail("nonzero outlier code under zero scale");
      ++next_out;
    } else {
      if (inlier_scales[c] == 0.0F && inlier_codes[in_pos] != 0) fail("nonzero inlier code under zero scale");
      ++in_pos;
    }
  }
}

}  // namespace hetq
