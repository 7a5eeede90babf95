#pragma once

// Key-value config files (INI syntax).
//
// System config:
//   [model]   param_count, rho, inlier_bits, outlier_bits, mlc_bits   (all required)
//   [system]  mram_channels, reram_arrays, power_budget_mw, e_network_pj_per_bit,
//             t_queue_ns, t_sync_cycles, sync_clock_ghz, flash_area_mm2
//   [mram] [reram] [lpddr5]
//             read_latency_ns, bandwidth_gib_s, read_energy_pj_per_bit, density_mb_per_mm2
//   [dse]     mram_channels = 1,2,4   reram_arrays = 16,32,64
// Everything outside [model] defaults to the built-in device table.
//
// Noise model:
//   mlc_bits, p_minus, p_plus   (required)   p_zero, seed   (optional)
//   [confusion] row0 = 0.99 0.01 0 0 ...     (optional, one row per state)

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hetq/error.hpp"
#include "hetq/memsys.hpp"
#include "hetq/noise_model.hpp"

namespace hetq::config {

namespace pt = boost::property_tree;

namespace detail {

inline pt::ptree parse_ini(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

inline pt::ptree read_ini_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_ini(in, path.string());
}

template <typename T>
T as(const pt::ptree& node, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("invalid value for '" + key + "': '" + node.data() + "'");
  }
}

inline std::vector<int> int_list(const std::string& text, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    try {
      out.push_back(std::stoi(item, &pos));
    } catch (const std::exception&) {
      throw ConfigError("invalid integer list for '" + key + "': '" + text + "'");
    }
    if (item.find_first_not_of(" \t", pos) != std::string::npos) {
      throw ConfigError("invalid integer list for '" + key + "': '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list for '" + key + "'");
  return out;
}

inline std::vector<double> real_row(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    std::size_t pos = 0;
    try {
      out.push_back(std::stod(tok, &pos));
    } catch (const std::exception&) {
      throw ConfigError("invalid number in '" + key + "': '" + tok + "'");
    }
    if (pos != tok.size()) throw ConfigError("invalid number in '" + key + "': '" + tok + "'");
  }
  return out;
}

/// Applies a setter per known key and rejects anything unrecognized.
using Setter = std::function<void(const pt::ptree&, const std::string&)>;

inline void apply(const pt::ptree& section, const std::string& prefix, const std::map<std::string, Setter>& setters,
                  std::set<std::string>* seen = nullptr) {
  for (const auto& [key, node] : section) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + full + "'");
    it->second(node, full);
    if (seen) seen->insert(key);
  }
}

inline std::map<std::string, Setter> device_setters(memsys::MemoryDevice& d) {
  return {
      {"read_latency_ns", [&d](const pt::ptree& n, const std::string& k) { d.read_latency_ns = as<double>(n, k); }},
      {"bandwidth_gib_s", [&d](const pt::ptree& n, const std::string& k) { d.bandwidth_gib_s = as<double>(n, k); }},
      {"read_energy_pj_per_bit",
       [&d](const pt::ptree& n, const std::string& k) { d.read_energy_pj_per_bit = as<double>(n, k); }},
      {"density_mb_per_mm2", [&d](const pt::ptree& n, const std::string& k) { d.density_mb_per_mm2 = as<double>(n, k); }},
  };
}

}  // namespace detail

inline memsys::SystemConfig parse_system_config(std::istream& in, const std::string& origin = "<config>") {
  using detail::as;
  using detail::Setter;
  const auto tree = detail::parse_ini(in, origin);
  memsys::SystemConfig cfg;

  const std::map<std::string, Setter> model = {
      {"param_count", [&](const auto& n, const auto& k) { cfg.param_count = as<double>(n, k); }},
      {"rho", [&](const auto& n, const auto& k) { cfg.rho = as<double>(n, k); }},
      {"inlier_bits", [&](const auto& n, const auto& k) { cfg.inlier_bits = as<int>(n, k); }},
      {"outlier_bits", [&](const auto& n, const auto& k) { cfg.outlier_bits = as<int>(n, k); }},
      {"mlc_bits", [&](const auto& n, const auto& k) { cfg.mlc_bits = as<int>(n, k); }},
  };
  const std::map<std::string, Setter> system = {
      {"mram_channels", [&](const auto& n, const auto& k) { cfg.mram_channels = as<int>(n, k); }},
      {"reram_arrays", [&](const auto& n, const auto& k) { cfg.reram_arrays = as<int>(n, k); }},
      {"power_budget_mw", [&](const auto& n, const auto& k) { cfg.power_budget_mw = as<double>(n, k); }},
      {"e_network_pj_per_bit", [&](const auto& n, const auto& k) { cfg.e_network_pj_per_bit = as<double>(n, k); }},
      {"t_queue_ns", [&](const auto& n, const auto& k) { cfg.t_queue_ns = as<double>(n, k); }},
      {"t_sync_cycles", [&](const auto& n, const auto& k) { cfg.t_sync_cycles = as<int>(n, k); }},
      {"sync_clock_ghz", [&](const auto& n, const auto& k) { cfg.sync_clock_ghz = as<double>(n, k); }},
      {"flash_area_mm2", [&](const auto& n, const auto& k) { cfg.flash_area_mm2 = as<double>(n, k); }},
  };
  const std::map<std::string, Setter> dse = {
      {"mram_channels", [&](const auto& n, const auto& k) { cfg.dse_mram_channels = detail::int_list(n.data(), k); }},
      {"reram_arrays", [&](const auto& n, const auto& k) { cfg.dse_reram_arrays = detail::int_list(n.data(), k); }},
  };

  std::set<std::string> model_seen;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) throw ConfigError("key '" + name + "' must sit inside a section");
    if (name == "model") {
      detail::apply(section, name, model, &model_seen);
    } else if (name == "system") {
      detail::apply(section, name, system);
    } else if (name == "dse") {
      detail::apply(section, name, dse);
    } else if (name == "mram") {
      detail::apply(section, name, detail::device_setters(cfg.mram));
    } else if (name == "reram") {
      detail::apply(section, name, detail::device_setters(cfg.reram));
    } else if (name == "lpddr5") {
      detail::apply(section, name, detail::device_setters(cfg.lpddr5));
    } else {
      throw ConfigError("unknown config section [" + name + "]");
    }
  }
  for (const auto& [key, setter] : model) {
    if (!model_seen.contains(key)) throw ConfigError("missing required config key 'model." + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline memsys::SystemConfig load_system_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_system_config(in, path.string());
}

inline NoiseModel parse_noise_model(std::istream& in, const std::string& origin = "<noise>") {
  using detail::as;
  using detail::Setter;
  const auto tree = detail::parse_ini(in, origin);
  NoiseModel m;
  bool has_zero = false;
  std::set<std::string> seen;
  const std::map<std::string, Setter> top = {
      {"mlc_bits", [&](const auto& n, const auto& k) { m.mlc_bits = as<int>(n, k); }},
      {"p_minus", [&](const auto& n, const auto& k) { m.p_minus = as<double>(n, k); }},
      {"p_plus", [&](const auto& n, const auto& k) { m.p_plus = as<double>(n, k); }},
      {"p_zero",
       [&](const auto& n, const auto& k) {
         m.p_zero = as<double>(n, k);
         has_zero = true;
       }},
      {"seed", [&](const auto& n, const auto& k) { m.seed = as<std::uint64_t>(n, k); }},
  };
  pt::ptree confusion;
  bool has_confusion = false;
  for (const auto& [name, node] : tree) {
    if (name == "confusion") {
      confusion = node;
      has_confusion = true;
      continue;
    }
    if (!node.empty()) throw ConfigError("unknown noise config section [" + name + "]");
    auto it = top.find(name);
    if (it == top.end()) throw ConfigError("unknown noise config key '" + name + "'");
    it->second(node, name);
    seen.insert(name);
  }
  for (const char* key : {"mlc_bits", "p_minus", "p_plus"}) {
    if (!seen.contains(key)) throw ConfigError(std::string("missing required noise key '") + key + "'");
  }
  if (!has_zero) m.p_zero = 1.0 - m.p_minus - m.p_plus;
  if (has_confusion) {
    if (m.mlc_bits != 2 && m.mlc_bits != 3) throw ConfigError("noise model mlc_bits must be 2 or 3");
    const std::size_t s = std::size_t{1} << m.mlc_bits;
    Matrix rows(s);
    std::set<std::string> row_seen;
    for (const auto& [key, node] : confusion) {
      std::size_t idx = s;
      if (key.rfind("row", 0) == 0) {
        try {
          std::size_t pos = 0;
          idx = std::stoul(key.substr(3), &pos);
          if (pos != key.size() - 3) idx = s;
        } catch (const std::exception&) {
          idx = s;
        }
      }
      if (idx >= s) throw ConfigError("unknown confusion key '" + key + "' (expected row0..row" + std::to_string(s - 1) + ")");
      rows[idx] = detail::real_row(node.data(), "confusion." + key);
      row_seen.insert(key);
    }
    if (row_seen.size() != s) throw ConfigError("confusion matrix needs exactly " + std::to_string(s) + " rows");
    m.confusion = std::move(rows);
  }
  m.validate();
  return m;
}

inline NoiseModel load_noise_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise config " + path.string());
  return parse_noise_model(in, path.string());
}

}  // namespace hetq::config
