#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetq/error.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/quantizer.hpp"
#include "hetq/rng.hpp"
#include "hetq/tensor.hpp"

namespace hetq::noise {

namespace detail {

inline std::size_t sample_row(const std::vector<double>& row, double u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  // u landed in the rounding slack above the row sum: take the last nonzero state.
  for (std::size_t j = row.size(); j-- > 0;) {
    if (row[j] > 0.0) return j;
  }
  return row.size() - 1;
}

}  // namespace detail

/// Shifts each code by -1, 0 or +1 level with (p_minus, p_zero, p_plus).
/// A shift that would leave [qmin, qmax] is dropped. When the model carries
/// a confusion matrix whose state count matches the code width, codes are
/// resampled through it instead (offset-binary state = code - qmin).
inline std::vector<std::int32_t> perturb_codes(std::span<const std::int32_t> codes, const QuantizerSpec& spec,
                                               const NoiseModel& model) {
  spec.validate();
  model.validate();
  Rng rng(model.seed);
  std::vector<std::int32_t> out(codes.begin(), codes.end());
  const auto lo = spec.qmin();
  const auto hi = spec.qmax();
  if (model.confusion && model.mlc_bits == spec.bits) {
    const auto& m = *model.confusion;
    for (auto& c : out) {
      if (c < lo || c > hi) throw ValidationError("perturb_codes: code outside quantizer range");
      c = static_cast<std::int32_t>(detail::sample_row(m[static_cast<std::size_t>(c - lo)], rng.uniform())) + lo;
    }
    return out;
  }
  const double p_down = model.p_minus;
  const double p_shift = model.p_minus + model.p_plus;
  for (auto& c : out) {
    if (c < lo || c > hi) throw ValidationError("perturb_codes: code outside quantizer range");
    const double u = rng.uniform();
    if (u < p_down) {
      if (c > lo) --c;
    } else if (u < p_shift) {
      if (c < hi) ++c;
    }
  }
  return out;
}

/// Packs 3-bit codes pairwise into 2-bit cells. For the offset-binary pair
/// (u0, u1) the three cells are
///   cell0 = u0[1:0],  cell1 = {u1[2], u0[2]},  cell2 = u1[1:0].
/// An odd count is padded with a zero code.
inline std::vector<std::uint8_t> pack_cells_2bit(std::span<const std::int32_t> codes) {
  const QuantizerSpec spec{3};
  std::vector<std::uint8_t> cells;
  cells.reserve((codes.size() + 1) / 2 * 3);
  for (std::size_t i = 0; i < codes.size(); i += 2) {
    const std::int32_t c0 = codes[i];
    const std::int32_t c1 = i + 1 < codes.size() ? codes[i + 1] : 0;
    for (auto c : {c0, c1}) {
      if (c < spec.qmin() || c > spec.qmax()) throw ValidationError("pack_cells_2bit: code outside 3-bit range");
    }
    const auto u0 = static_cast<std::uint8_t>(c0 - spec.qmin());
    const auto u1 = static_cast<std::uint8_t>(c1 - spec.qmin());
    cells.push_back(u0 & 0x3U);
    cells.push_back(static_cast<std::uint8_t>(((u1 >> 2) & 1U) << 1 | ((u0 >> 2) & 1U)));
    cells.push_back(u1 & 0x3U);
  }
  return cells;
}

inline std::vector<std::int32_t> unpack_cells_2bit(std::span<const std::uint8_t> cells, std::size_t count) {
  if (cells.size() != (count + 1) / 2 * 3) throw ValidationError("unpack_cells_2bit: cell count does not match code count");
  const std::int32_t offset = 4;
  std::vector<std::int32_t> codes;
  codes.reserve(count + 1);
  for (std::size_t g = 0; g < cells.size(); g += 3) {
    const unsigned u0 = (cells[g] & 0x3U) | ((cells[g + 1] & 0x1U) << 2);
    const unsigned u1 = (cells[g + 2] & 0x3U) | (((cells[g + 1] >> 1) & 0x1U) << 2);
    codes.push_back(static_cast<std::int32_t>(u0) - offset);
    codes.push_back(static_cast<std::int32_t>(u1) - offset);
  }
  codes.resize(count);
  return codes;
}

/// Reads every cell through the model's state transition matrix.
inline std::vector<std::uint8_t> perturb_cells(std::span<const std::uint8_t> cells, const NoiseModel& model) {
  model.validate();
  const auto m = model.transition_matrix();
  Rng rng(model.seed);
  std::vector<std::uint8_t> out(cells.begin(), cells.end());
  for (auto& cell : out) {
    if (cell >= m.size()) throw ValidationError("perturb_cells: cell state out of range");
    cell = static_cast<std::uint8_t>(detail::sample_row(m[cell], rng.uniform()));
  }
  return out;
}

/// Stores 3-bit codes in 2-bit MLC cells, perturbs each cell independently,
/// and reads the codes back. One cell error can move a code by more than one
/// level (an error on the shared cell hits the high bit).
inline std::vector<std::int32_t> perturb_cells_2bit(std::span<const std::int32_t> codes, const NoiseModel& model) {
  if (model.mlc_bits != 2) throw ConfigError("perturb_cells_2bit requires a 2-bit MLC noise model");
  return unpack_cells_2bit(perturb_cells(pack_cells_2bit(codes), model), codes.size());
}

/// Monte-Carlo estimate of the per-read state error probability. In the
/// adjacent-state form this samples the {-1, 0, +1} draw directly; with a
/// confusion matrix it samples a uniformly random stored state.
inline double empirical_ber(const NoiseModel& model, std::size_t samples) {
  model.validate();
  if (samples == 0) throw ConfigError("empirical_ber: samples must be >= 1");
  Rng rng(model.seed);
  std::size_t errors = 0;
  if (model.confusion) {
    const auto& m = *model.confusion;
    const auto s = m.size();
    for (std::size_t i = 0; i < samples; ++i) {
      const auto state = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(s)), s - 1);
      if (detail::sample_row(m[state], rng.uniform()) != state) ++errors;
    }
  } else {
    const double p = model.flip_probability();
    for (std::size_t i = 0; i < samples; ++i) {
      if (rng.uniform() < p) ++errors;
    }
  }
  return static_cast<double>(errors) / static_cast<double>(samples);
}

enum class InjectMode { code, cell };

struct InjectStats {
  std::size_t codes = 0;
  std::size_t changed = 0;
};

/// Applies ReRAM read noise to the inlier codes of a quantized tensor.
/// Outliers live in MRAM and are left untouched. Channels with a zero inlier
/// scale hold no stored levels, so their codes stay zero.
inline QuantizedTensor inject(const QuantizedTensor& q, const NoiseModel& model, InjectMode mode,
                              InjectStats* stats = nullptr) {
  q.validate();
  QuantizedTensor out = q;
  if (mode == InjectMode::cell) {
    if (q.inlier_bits != 3) throw ConfigError("cell-level injection requires 3-bit inlier codes");
    out.inlier_codes = perturb_cells_2bit(q.inlier_codes, model);
  } else {
    out.inlier_codes = perturb_codes(q.inlier_codes, QuantizerSpec{q.inlier_bits}, model);
  }
  const auto lay = q.layout();
  std::size_t j = 0;
  std::size_t k = 0;
  for (std::size_t flat = 0; flat < q.size(); ++flat) {
    if (j < q.outlier_indices.size() && q.outlier_indices[j] == flat) {
      ++j;
      continue;
    }
    if (q.inlier_scales[lay.channel_of(flat)] == 0.0F) out.inlier_codes[k] = 0;
    ++k;
  }
  if (stats) {
    stats->codes += q.inlier_codes.size();
    for (std::size_t i = 0; i < q.inlier_codes.size(); ++i) {
      if (out.inlier_codes[i] != q.inlier_codes[i]) ++stats->changed;
    }
  }
  return out;
}

}  // namespace hetq::noise
