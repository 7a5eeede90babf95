#pragma once

// JSON and CSV renderings with fixed key and column order.

#include <cstdio>
#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "hetq/memsys.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/sweep.hpp"

namespace hetq::report {

using Json = nlohmann::ordered_json;

inline Json to_json(const memsys::MemoryDevice& d) {
  return Json{{"read_latency_ns", d.read_latency_ns},
              {"bandwidth_gib_s", d.bandwidth_gib_s},
              {"bandwidth_unit", d.unit_name},
              {"read_energy_pj_per_bit", d.read_energy_pj_per_bit},
              {"density_mb_per_mm2", d.density_mb_per_mm2}};
}

inline Json to_json(const memsys::SystemConfig& c) {
  return Json{{"model",
               {{"param_count", c.param_count},
                {"rho", c.rho},
                {"inlier_bits", c.inlier_bits},
                {"outlier_bits", c.outlier_bits},
                {"mlc_bits", c.mlc_bits}}},
              {"system",
               {{"mram_channels", c.mram_channels},
                {"reram_arrays", c.reram_arrays},
                {"power_budget_mw", c.power_budget_mw},
                {"e_network_pj_per_bit", c.e_network_pj_per_bit},
                {"t_queue_ns", c.t_queue_ns},
                {"t_sync_cycles", c.t_sync_cycles},
                {"sync_clock_ghz", c.sync_clock_ghz},
                {"flash_area_mm2", c.flash_area_mm2}}},
              {"mram", to_json(c.mram)},
              {"reram", to_json(c.reram)},
              {"lpddr5", to_json(c.lpddr5)},
              {"dse", {{"mram_channels", c.dse_mram_channels}, {"reram_arrays", c.dse_reram_arrays}}}};
}

inline Json to_json(const NoiseModel& m) {
  Json j{{"mlc_bits", m.mlc_bits},
         {"p_minus", m.p_minus},
         {"p_zero", m.p_zero},
         {"p_plus", m.p_plus},
         {"seed", m.seed},
         {"placeholder_defaults", m.placeholder}};
  j["confusion"] = m.confusion ? Json(*m.confusion) : Json(nullptr);
  return j;
}

inline Json to_json(const memsys::CostReport& r) {
  return Json{{"bits_per_weight", r.bits_per_weight},
              {"compression_ratio", r.compression_ratio},
              {"cells_per_weight", r.cells_per_weight},
              {"cell_reduction", r.cell_reduction},
              {"external_bits_per_weight", r.external_bits_per_weight},
              {"external_transfer_reduction", r.external_transfer_reduction},
              {"dram_weight_access_reduction", r.dram_weight_access_reduction},
              {"energy_per_weight_pj", r.energy_per_weight_pj},
              {"baseline_energy_per_weight_pj", r.baseline_energy_per_weight_pj},
              {"energy_reduction", r.energy_reduction},
              {"latency_per_step_s", r.latency_per_step_s},
              {"baseline_latency_per_step_s", r.baseline_latency_per_step_s},
              {"latency_reduction", r.latency_reduction},
              {"bottleneck", memsys::to_string(r.bottleneck)},
              {"power_mw", r.power_mw},
              {"power_budget_mw", r.power_budget_mw},
              {"power_feasible", r.power_feasible},
              {"reram_area_mm2", r.reram_area_mm2},
              {"mram_area_mm2", r.mram_area_mm2},
              {"nvm_area_mm2", r.nvm_area_mm2},
              {"baseline_area_mm2", r.baseline_area_mm2},
              {"area_delta_mm2", r.area_delta_mm2}};
}

inline Json to_json(const memsys::DseCandidate& c) {
  Json j{{"mram_channels", c.alloc.mram_channels},
         {"reram_arrays", c.alloc.reram_arrays},
         {"mram_gib_s", c.mram_gib_s},
         {"reram_gib_s", c.reram_gib_s},
         {"power_mw", c.power_mw},
         {"power_ok", c.power_ok},
         {"latency_ok", c.latency_ok}};
  if (c.latency) {
    j["latency_s"] = c.latency->final_s;
    j["bottleneck"] = memsys::to_string(c.latency->bottleneck);
  } else {
    j["latency_s"] = nullptr;
    j["bottleneck"] = nullptr;
  }
  j["feasible"] = c.feasible();
  j["pareto"] = c.pareto;
  return j;
}

inline Json to_json(const memsys::DseResult& r, double power_budget_mw) {
  Json table = Json::array();
  for (const auto& c : r.table) table.push_back(to_json(c));
  return Json{{"power_budget_mw", power_budget_mw}, {"best", to_json(r.best)}, {"candidates", std::move(table)}};
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out =
      "rho,mse_proxy,bits_per_weight,normalized_energy,normalized_latency,mram_channels,reram_arrays,bottleneck\n";
  for (const auto& r : rows) {
    out += format_number(r.rho) + "," + format_number(r.mse_proxy) + "," + format_number(r.bits_per_weight) + "," +
           format_number(r.normalized_energy) + "," + format_number(r.normalized_latency) + "," +
           std::to_string(r.mram_channels) + "," + std::to_string(r.reram_arrays) + "," +
           memsys::to_string(r.bottleneck) + "\n";
  }
  return out;
}

}  // namespace hetq::report
