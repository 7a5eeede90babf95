#pragma once

// Analytical model of the MRAM + MLC-ReRAM weight store against an
// FP16/LPDDR5 baseline.
//
// Units: latencies in ns (config) and seconds (results), bandwidth in GiB/s
// per channel or array, energy in pJ/bit, density in Mb/mm^2 with
// Mb = 2^20 bits, power in mW.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hetq/error.hpp"

namespace hetq::memsys {

inline constexpr double kBitsPerGiB = 8.0 * 1024.0 * 1024.0 * 1024.0;
inline constexpr double kBitsPerMb = 1024.0 * 1024.0;
inline constexpr double kBaselineBits = 16.0;

struct MemoryDevice {
  std::string name;
  double read_latency_ns = 0.0;
  double bandwidth_gib_s = 0.0;  // per unit
  double read_energy_pj_per_bit = 0.0;
  double density_mb_per_mm2 = 0.0;
  std::string unit_name = "channel";

  double unit_bandwidth_bits_per_s() const { return bandwidth_gib_s * kBitsPerGiB; }

  void validate() const {
    if (!(read_latency_ns >= 0.0) || !(bandwidth_gib_s > 0.0) || !(read_energy_pj_per_bit > 0.0) ||
        !(density_mb_per_mm2 > 0.0)) {
      throw ConfigError("device '" + name + "': bandwidth, energy and density must be positive, latency non-negative");
    }
  }

  static MemoryDevice mram() { return {"mram", 3.5, 36.57, 1.0, 66.0, "channel"}; }
  // Read latency is listed only as "< 5 ns"; the bound is used.
  static MemoryDevice reram() { return {"reram", 5.0, 1.8, 1.56, 30.1, "array"}; }
  static MemoryDevice lpddr5() { return {"lpddr5", 1.7, 186.26, 3.5, 209.9, "channel"}; }
};

struct SystemConfig {
  MemoryDevice mram = MemoryDevice::mram();
  MemoryDevice reram = MemoryDevice::reram();
  MemoryDevice lpddr5 = MemoryDevice::lpddr5();

  int mram_channels = 4;
  int reram_arrays = 112;
  double power_budget_mw = 5000.0;
  double e_network_pj_per_bit = 0.0;
  double t_queue_ns = 0.0;
  int t_sync_cycles = 3;
  double sync_clock_ghz = 3.3;
  double flash_area_mm2 = 0.0;

  double param_count = 1.513e9;
  double rho = 0.3;
  int inlier_bits = 3;
  int outlier_bits = 5;
  int mlc_bits = 3;

  std::vector<int> dse_mram_channels{1, 2, 3, 4};
  std::vector<int> dse_reram_arrays{16, 32, 48, 64, 80, 96, 112};

  double t_sync_s() const { return t_sync_cycles / (sync_clock_ghz * 1e9); }

  /// Bits streamed from MRAM (outliers) and ReRAM (inliers) per full pass over the weights.
  double mram_bits() const { return rho * param_count * outlier_bits; }
  double reram_bits() const { return (1.0 - rho) * param_count * inlier_bits; }

  void validate() const {
    mram.validate();
    reram.validate();
    lpddr5.validate();
    if (mram_channels < 0 || reram_arrays < 0) throw ConfigError("channel and array counts must be >= 0");
    if (t_sync_cycles < 2 || t_sync_cycles > 4) throw ConfigError("t_sync_cycles must lie in [2,4]");
    if (!(sync_clock_ghz > 0.0)) throw ConfigError("sync_clock_ghz must be positive");
    if (!(power_budget_mw >= 0.0)) throw ConfigError("power_budget_mw must be >= 0");
    if (!(e_network_pj_per_bit >= 0.0) || !(t_queue_ns >= 0.0) || !(flash_area_mm2 >= 0.0)) {
      throw ConfigError("e_network, t_queue and flash_area must be >= 0");
    }
    if (!(param_count >= 0.0)) throw ConfigError("param_count must be >= 0");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
    if (inlier_bits < 1 || inlier_bits > 16 || outlier_bits < 1 || outlier_bits > 16) {
      throw ConfigError("bit-widths must lie in [1,16]");
    }
    if (mlc_bits < 1 || mlc_bits > 3) throw ConfigError("mlc_bits must lie in [1,3]");
    for (int v : dse_mram_channels) {
      if (v < 0) throw ConfigError("dse channel options must be >= 0");
    }
    for (int v : dse_reram_arrays) {
      if (v < 0) throw ConfigError("dse array options must be >= 0");
    }
  }
};

struct Allocation {
  int mram_channels = 0;
  int reram_arrays = 0;

  double mram_bits_per_s(const SystemConfig& cfg) const { return mram_channels * cfg.mram.unit_bandwidth_bits_per_s(); }
  double reram_bits_per_s(const SystemConfig& cfg) const { return reram_arrays * cfg.reram.unit_bandwidth_bits_per_s(); }
};

enum class Bottleneck { mram, reram };

inline const char* to_string(Bottleneck b) { return b == Bottleneck::mram ? "mram" : "reram"; }

struct LatencyBreakdown {
  double mram_s = 0.0;
  double reram_s = 0.0;
  double sync_s = 0.0;
  double final_s = 0.0;
  Bottleneck bottleneck = Bottleneck::reram;
};

/// Per-device T = t_access + size / bandwidth + t_queue. A zero-size transfer
/// costs only access and queue time.
inline double device_latency_s(double bits, double bits_per_s, double access_ns, double queue_ns,
                               const std::string& device) {
  double transfer = 0.0;
  if (bits > 0.0) {
    if (!(bits_per_s > 0.0)) throw InfeasibleError(device + ": nonzero transfer with zero allocated bandwidth");
    transfer = bits / bits_per_s;
  }
  return (access_ns + queue_ns) * 1e-9 + transfer;
}

/// MRAM and ReRAM are read concurrently, so the final latency is the slower
/// path plus the clock-domain-crossing delay.
inline LatencyBreakdown weight_load_latency(double mram_bits, double reram_bits, double mram_bits_per_s,
                                            double reram_bits_per_s, const SystemConfig& cfg) {
  LatencyBreakdown r;
  r.mram_s = device_latency_s(mram_bits, mram_bits_per_s, cfg.mram.read_latency_ns, cfg.t_queue_ns, "mram");
  r.reram_s = device_latency_s(reram_bits, reram_bits_per_s, cfg.reram.read_latency_ns, cfg.t_queue_ns, "reram");
  r.sync_s = cfg.t_sync_s();
  r.bottleneck = r.mram_s > r.reram_s ? Bottleneck::mram : Bottleneck::reram;
  r.final_s = std::max(r.mram_s, r.reram_s) + r.sync_s;
  return r;
}

inline LatencyBreakdown weight_load_latency(double mram_bits, double reram_bits, const Allocation& alloc,
                                            const SystemConfig& cfg) {
  return weight_load_latency(mram_bits, reram_bits, alloc.mram_bits_per_s(cfg), alloc.reram_bits_per_s(cfg), cfg);
}

/// One decode step streams every weight once.
inline LatencyBreakdown step_latency(const Allocation& alloc, const SystemConfig& cfg) {
  return weight_load_latency(cfg.mram_bits(), cfg.reram_bits(), alloc, cfg);
}

inline double baseline_step_latency_s(const SystemConfig& cfg) {
  return device_latency_s(cfg.param_count * kBaselineBits, cfg.lpddr5.unit_bandwidth_bits_per_s(),
                          cfg.lpddr5.read_latency_ns, cfg.t_queue_ns, "lpddr5");
}

/// Sustained read power in mW at the given bandwidths (bits/s).
inline double power_mw(double mram_bits_per_s, double reram_bits_per_s, const SystemConfig& cfg) {
  const double e_net = cfg.e_network_pj_per_bit;
  const double joules_per_s = mram_bits_per_s * (cfg.mram.read_energy_pj_per_bit + e_net) * 1e-12 +
                              reram_bits_per_s * (cfg.reram.read_energy_pj_per_bit + e_net) * 1e-12;
  return joules_per_s * 1e3;
}

/// Strict budget check: P_budget > consumption.
inline bool power_feasible(double mram_bits_per_s, double reram_bits_per_s, const SystemConfig& cfg) {
  return cfg.power_budget_mw > power_mw(mram_bits_per_s, reram_bits_per_s, cfg);
}

inline bool power_feasible(const Allocation& alloc, const SystemConfig& cfg) {
  return power_feasible(alloc.mram_bits_per_s(cfg), alloc.reram_bits_per_s(cfg), cfg);
}

struct AreaReport {
  double reram_mm2 = 0.0;
  double mram_mm2 = 0.0;
  double baseline_mm2 = 0.0;

  double nvm_mm2() const { return reram_mm2 + mram_mm2; }
};

inline AreaReport area_report(const SystemConfig& cfg) {
  AreaReport a;
  a.reram_mm2 = cfg.reram_bits() / (cfg.reram.density_mb_per_mm2 * kBitsPerMb);
  a.mram_mm2 = cfg.mram_bits() / (cfg.mram.density_mb_per_mm2 * kBitsPerMb);
  a.baseline_mm2 = cfg.param_count * kBaselineBits / (cfg.lpddr5.density_mb_per_mm2 * kBitsPerMb);
  if (cfg.param_count > 0.0) a.baseline_mm2 += cfg.flash_area_mm2;
  return a;
}

struct CostReport {
  double bits_per_weight = 0.0;
  double compression_ratio = 0.0;
  double cells_per_weight = 0.0;
  double cell_reduction = 0.0;
  double external_bits_per_weight = 0.0;
  double external_transfer_reduction = 0.0;
  double dram_weight_access_reduction = 0.0;
  double energy_per_weight_pj = 0.0;
  double baseline_energy_per_weight_pj = 0.0;
  double energy_reduction = 0.0;
  double latency_per_step_s = 0.0;
  double baseline_latency_per_step_s = 0.0;
  double latency_reduction = 0.0;
  Bottleneck bottleneck = Bottleneck::reram;
  double power_mw = 0.0;
  double power_budget_mw = 0.0;
  bool power_feasible = false;
  double reram_area_mm2 = 0.0;
  double mram_area_mm2 = 0.0;
  double nvm_area_mm2 = 0.0;
  double baseline_area_mm2 = 0.0;
  double area_delta_mm2 = 0.0;
};

/// Inlier cells per weight with dense packing across weights (two 3-bit
/// codes in three 2-bit cells gives 1.5). MRAM stores one bit per cell.
inline double inlier_cells_per_weight(int inlier_bits, int mlc_bits) {
  return static_cast<double>(inlier_bits) / static_cast<double>(mlc_bits);
}

/// Per-weight payload, cell, traffic, energy, latency and area figures for
/// `cfg`, each next to its FP16/LPDDR5 counterpart. Scale and index metadata
/// are not part of the payload.
inline CostReport cost_report(const SystemConfig& cfg) {
  cfg.validate();
  const double rho = cfg.rho;
  const double in_bits = (1.0 - rho) * cfg.inlier_bits;
  const double out_bits = rho * cfg.outlier_bits;
  const double e_net = cfg.e_network_pj_per_bit;

  CostReport r;
  r.bits_per_weight = in_bits + out_bits;
  r.compression_ratio = kBaselineBits / r.bits_per_weight;
  r.cells_per_weight = (1.0 - rho) * inlier_cells_per_weight(cfg.inlier_bits, cfg.mlc_bits) + out_bits;
  r.cell_reduction = kBaselineBits / r.cells_per_weight;
  // Outliers sit in on-chip MRAM; only ReRAM traffic crosses the package.
  r.external_bits_per_weight = in_bits;
  r.external_transfer_reduction = kBaselineBits / r.external_bits_per_weight;
  r.dram_weight_access_reduction = 1.0 - r.external_bits_per_weight / kBaselineBits;
  r.energy_per_weight_pj =
      in_bits * (cfg.reram.read_energy_pj_per_bit + e_net) + out_bits * (cfg.mram.read_energy_pj_per_bit + e_net);
  r.baseline_energy_per_weight_pj = kBaselineBits * (cfg.lpddr5.read_energy_pj_per_bit + e_net);
  r.energy_reduction = r.baseline_energy_per_weight_pj / r.energy_per_weight_pj;

  const Allocation alloc{cfg.mram_channels, cfg.reram_arrays};
  const auto lat = step_latency(alloc, cfg);
  r.latency_per_step_s = lat.final_s;
  r.bottleneck = lat.bottleneck;
  r.baseline_latency_per_step_s = baseline_step_latency_s(cfg);
  r.latency_reduction = r.baseline_latency_per_step_s / r.latency_per_step_s;
  r.power_mw = power_mw(alloc.mram_bits_per_s(cfg), alloc.reram_bits_per_s(cfg), cfg);
  r.power_budget_mw = cfg.power_budget_mw;
  r.power_feasible = power_feasible(alloc, cfg);

  const auto area = area_report(cfg);
  r.reram_area_mm2 = area.reram_mm2;
  r.mram_area_mm2 = area.mram_mm2;
  r.nvm_area_mm2 = area.nvm_mm2();
  r.baseline_area_mm2 = area.baseline_mm2;
  r.area_delta_mm2 = r.nvm_area_mm2 - r.baseline_area_mm2;
  return r;
}

struct DseCandidate {
  Allocation alloc;
  double mram_gib_s = 0.0;
  double reram_gib_s = 0.0;
  double power_mw = 0.0;
  bool power_ok = false;
  bool latency_ok = false;
  std::optional<LatencyBreakdown> latency;  // empty when latency is infeasible
  bool pareto = false;

  bool feasible() const { return power_ok && latency_ok; }
  int units() const { return alloc.mram_channels + alloc.reram_arrays; }
};

struct DseResult {
  DseCandidate best;
  std::vector<DseCandidate> table;  // every grid point, in grid order
};

inline DseCandidate evaluate_candidate(const Allocation& alloc, const SystemConfig& cfg) {
  DseCandidate c;
  c.alloc = alloc;
  c.mram_gib_s = alloc.mram_channels * cfg.mram.bandwidth_gib_s;
  c.reram_gib_s = alloc.reram_arrays * cfg.reram.bandwidth_gib_s;
  c.power_mw = power_mw(alloc.mram_bits_per_s(cfg), alloc.reram_bits_per_s(cfg), cfg);
  c.power_ok = power_feasible(alloc, cfg);
  try {
    c.latency = step_latency(alloc, cfg);
    c.latency_ok = true;
  } catch (const InfeasibleError&) {
    c.latency_ok = false;
  }
  return c;
}

/// Strict preference order among feasible candidates: lower latency, then
/// lower power, then fewer units, then fewer MRAM channels.
inline bool better_candidate(const DseCandidate& a, const DseCandidate& b) {
  return std::make_tuple(a.latency->final_s, a.power_mw, a.units(), a.alloc.mram_channels) <
         std::make_tuple(b.latency->final_s, b.power_mw, b.units(), b.alloc.mram_channels);
}

/// Enumerates MRAM channel x ReRAM array allocations, drops those violating
/// the power budget or unable to carry their transfer, and returns the
/// fastest survivor for one decode step.
inline DseResult explore_bandwidth(const SystemConfig& cfg, const std::vector<int>& mram_options,
                                   const std::vector<int>& reram_options) {
  cfg.validate();
  if (mram_options.empty() || reram_options.empty()) throw ConfigError("DSE candidate grid is empty");
  DseResult res;
  for (int m : mram_options) {
    for (int a : reram_options) {
      if (m < 0 || a < 0) throw ConfigError("DSE candidate counts must be >= 0");
      res.table.push_back(evaluate_candidate(Allocation{m, a}, cfg));
    }
  }
  const DseCandidate* best = nullptr;
  for (const auto& c : res.table) {
    if (c.feasible() && (best == nullptr || better_candidate(c, *best))) best = &c;
  }
  if (best == nullptr) {
    throw InfeasibleError("no bandwidth configuration satisfies the power budget of " +
                          std::to_string(cfg.power_budget_mw) + " mW and the latency constraint");
  }
  for (auto& c : res.table) {
    if (!c.feasible()) continue;
    c.pareto = std::none_of(res.table.begin(), res.table.end(), [&](const DseCandidate& o) {
      if (!o.feasible()) return false;
      const double lo = o.latency->final_s;
      const double lc = c.latency->final_s;
      return lo <= lc && o.power_mw <= c.power_mw && (lo < lc || o.power_mw < c.power_mw);
    });
  }
  res.best = *best;
  return res;
}

inline DseResult explore_bandwidth(const SystemConfig& cfg) {
  return explore_bandwidth(cfg, cfg.dse_mram_channels, cfg.dse_reram_arrays);
}

}  // namespace hetq::memsys
