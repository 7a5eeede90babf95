#pragma once

// Outlier-aware dual-precision quantization of whole tensors:
//   1. select the top-rho fraction of weights by magnitude as outliers;
//   2. quantize each channel's inliers at inlier_bits with the noise-aware scale;
//   3. quantize each channel's outliers at outlier_bits with the MSE-optimal scale;
//   4. scatter both reconstructions back to their positions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetq/error.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/partition.hpp"
#include "hetq/quantizer.hpp"
#include "hetq/tensor.hpp"

namespace hetq {

struct QuantizeOptions {
  double rho = 0.3;
  QuantizerSpec inlier{3};
  QuantizerSpec outlier{5};
  NoiseModel noise = NoiseModel::defaults(3);
  ScaleSearchConfig search{};

  void validate() const {
    check_rho(rho);
    inlier.validate();
    outlier.validate();
    noise.validate();
    search.validate();
  }
};

inline QuantizedTensor quantize_tensor(const WeightTensor& tensor, const QuantizeOptions& opt) {
  tensor.validate();
  opt.validate();
  const auto mask = select_outliers(tensor, opt.rho);
  const auto lay = tensor.layout();
  const std::size_t n = tensor.size();

  std::vector<bool> is_outlier(n, false);
  for (auto i : mask.outlier_indices) is_outlier[i] = true;

  QuantizedTensor q;
  q.name = tensor.name;
  q.dims = tensor.dims;
  q.channel_axis = tensor.channel_axis;
  q.inlier_bits = opt.inlier.bits;
  q.outlier_bits = opt.outlier.bits;
  q.rho = static_cast<float>(opt.rho);
  q.inlier_scales.assign(lay.channels, 0.0F);
  q.outlier_scales.assign(lay.channels, 0.0F);

  std::vector<float> inliers;
  std::vector<float> outliers;
  for (std::size_t c = 0; c < lay.channels; ++c) {
    inliers.clear();
    outliers.clear();
    for (auto flat : lay.indices_of(c)) {
      (is_outlier[flat] ? outliers : inliers).push_back(tensor.data[flat]);
    }
    q.inlier_scales[c] = noise_aware_scale(inliers, opt.inlier, opt.noise, opt.search);
    q.outlier_scales[c] = mse_optimal_scale(outliers, opt.outlier, opt.search);
  }

  q.outlier_indices = mask.outlier_indices;
  q.outlier_codes.reserve(mask.outlier_indices.size());
  q.inlier_codes.reserve(n - mask.outlier_indices.size());
  for (std::size_t flat = 0; flat < n; ++flat) {
    const std::size_t c = lay.channel_of(flat);
    const bool out = is_outlier[flat];
    const float s = out ? q.outlier_scales[c] : q.inlier_scales[c];
    const std::int32_t code = s > 0.0F ? quantize_value(tensor.data[flat], s, out ? opt.outlier : opt.inlier) : 0;
    (out ? q.outlier_codes : q.inlier_codes).push_back(code);
  }
  return q;
}

inline QuantizedTensor quantize_tensor(const WeightTensor& tensor, double rho, const QuantizerSpec& inlier_spec,
                                       const QuantizerSpec& outlier_spec, const NoiseModel& noise,
                                       const ScaleSearchConfig& search = {}) {
  return quantize_tensor(tensor, QuantizeOptions{rho, inlier_spec, outlier_spec, noise, search});
}

/// Positional merge of outlier reconstructions (at outlier_indices) and
/// inlier reconstructions (everywhere else, in ascending order).
inline std::vector<float> scatter(std::size_t n, std::span<const std::uint64_t> outlier_indices,
                                  std::span<const float> inlier_values, std::span<const float> outlier_values) {
  if (outlier_values.size() != outlier_indices.size() || inlier_values.size() + outlier_values.size() != n) {
    throw ValidationError("scatter: value counts do not cover the tensor");
  }
  std::vector<float> out(n);
  std::size_t j = 0;
  std::size_t k = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (j < outlier_indices.size() && outlier_indices[j] == flat) {
      out[flat] = outlier_values[j++];
    } else {
      out[flat] = inlier_values[k++];
    }
  }
  if (j != outlier_indices.size()) throw ValidationError("scatter: outlier index out of range or unsorted");
  return out;
}

inline WeightTensor dequantize(const QuantizedTensor& q) {
  q.validate();
  const auto lay = q.layout();
  const std::size_t n = q.size();
  std::vector<float> in_vals;
  std::vector<float> out_vals(q.outlier_codes.size());
  in_vals.reserve(q.inlier_codes.size());
  for (std::size_t j = 0; j < q.outlier_indices.size(); ++j) {
    out_vals[j] = dequantize_value(q.outlier_codes[j], q.outlier_scales[lay.channel_of(q.outlier_indices[j])]);
  }
  std::size_t j = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (j < q.outlier_indices.size() && q.outlier_indices[j] == flat) {
      ++j;
      continue;
    }
    in_vals.push_back(dequantize_value(q.inlier_codes[in_vals.size()], q.inlier_scales[lay.channel_of(flat)]));
  }
  return WeightTensor{q.name, q.dims, q.channel_axis, scatter(n, q.outlier_indices, in_vals, out_vals)};
}

/// Sum of squared differences between a tensor and its reconstruction.
inline double reconstruction_error(const WeightTensor& original, const QuantizedTensor& q) {
  const auto recon = dequantize(q);
  if (recon.data.size() != original.data.size()) throw ValidationError("reconstruction_error: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < recon.data.size(); ++i) {
    const double d = static_cast<double>(original.data[i]) - recon.data[i];
    acc += d * d;
  }
  return acc;
}

/// Payload bits per weight: (1 - rho) b_in + rho b_out, using the actual
/// outlier count.
inline double payload_bits_per_weight(const QuantizedTensor& q) {
  const double n = static_cast<double>(q.size());
  const double n_out = static_cast<double>(q.outlier_indices.size());
  return ((n - n_out) * q.inlier_bits + n_out * q.outlier_bits) / n;
}

/// Scale and index metadata bits per weight (not counted in compression).
inline double metadata_bits_per_weight(const QuantizedTensor& q) {
  const double n = static_cast<double>(q.size());
  return (64.0 * static_cast<double>(q.inlier_scales.size()) + 64.0 * static_cast<double>(q.outlier_indices.size())) / n;
}

}  // namespace hetq
