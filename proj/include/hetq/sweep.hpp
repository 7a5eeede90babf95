#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetq/memsys.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/partition.hpp"
#include "hetq/pipeline.hpp"
#include "hetq/quantizer.hpp"
#include "hetq/tensor.hpp"

namespace hetq {

struct SweepRow {
  double rho = 0.0;
  double mse_proxy = 0.0;  // mean squared reconstruction error over all elements
  double bits_per_weight = 0.0;
  double normalized_energy = 0.0;   // vs FP16 on LPDDR5
  double normalized_latency = 0.0;  // DSE-optimal step latency vs FP16 on LPDDR5
  int mram_channels = 0;
  int reram_arrays = 0;
  memsys::Bottleneck bottleneck = memsys::Bottleneck::reram;
};

/// Re-quantizes `tensors` at each outlier ratio and re-runs the cost model and
/// bandwidth exploration with that ratio. Bit-widths come from `cfg`;
/// `noise` and `search` drive the inlier scale choice.
inline std::vector<SweepRow> sweep_rho(const memsys::SystemConfig& cfg, std::span<const double> rhos,
                                       std::span<const WeightTensor> tensors, const NoiseModel& noise,
                                       const ScaleSearchConfig& search = {}) {
  std::vector<SweepRow> rows;
  rows.reserve(rhos.size());
  for (double rho : rhos) {
    check_rho(rho);
    memsys::SystemConfig c = cfg;
    c.rho = rho;

    SweepRow row;
    row.rho = rho;
    const QuantizeOptions opt{rho, QuantizerSpec::of(c.inlier_bits), QuantizerSpec::of(c.outlier_bits), noise, search};
    double err = 0.0;
    std::size_t count = 0;
    for (const auto& t : tensors) {
      err += reconstruction_error(t, quantize_tensor(t, opt));
      count += t.size();
    }
    row.mse_proxy = count > 0 ? err / static_cast<double>(count) : 0.0;

    const auto report = memsys::cost_report(c);
    row.bits_per_weight = report.bits_per_weight;
    row.normalized_energy = 1.0 / report.energy_reduction;
    const auto dse = memsys::explore_bandwidth(c);
    row.normalized_latency = dse.best.latency->final_s / memsys::baseline_step_latency_s(c);
    row.mram_channels = dse.best.alloc.mram_channels;
    row.reram_arrays = dse.best.alloc.reram_arrays;
    row.bottleneck = dse.best.latency->bottleneck;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hetq
