// hetq command-line front end.
//
// Exit codes: 0 success, 2 usage/validation, 3 format/I-O, 4 infeasible.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hetq/hetq.hpp"

namespace fs = std::filesystem;
using hetq::report::Json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kFormat = 3, kInfeasible = 4 };

struct Manifest {
  std::string command;
  std::vector<std::string> args;
  Json config = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;

  Json to_json() const {
    return Json{{"tool", "hetq"},   {"version", kToolVersion}, {"command", command}, {"args", args},
                {"seed", seed},     {"inputs", inputs},        {"outputs", outputs}, {"config", config}};
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw hetq::IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw hetq::IoError("write failed: " + path.string());
}

fs::path manifest_path(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

void write_manifest(const fs::path& output, const Manifest& m) { write_text(manifest_path(output), m.to_json().dump(2) + "\n"); }

/// Emits `text` to `out` when given, else stdout; a manifest accompanies every file output.
void emit(const std::string& out, const std::string& text, Manifest& m) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  m.outputs.push_back(out);
  write_text(out, text);
  write_manifest(out, m);
}

std::vector<double> parse_rho_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw hetq::ConfigError("invalid rho list '" + text + "'");
    }
    if (pos != item.size()) throw hetq::ConfigError("invalid rho list '" + text + "'");
    hetq::check_rho(v);
    out.push_back(v);
  }
  if (out.empty()) throw hetq::ConfigError("empty rho list");
  return out;
}

hetq::NoiseModel resolve_noise(const std::string& noise_path, int mlc_bits, std::optional<std::uint64_t> seed) {
  auto noise = noise_path.empty() ? hetq::NoiseModel::defaults(mlc_bits) : hetq::config::load_noise_model(noise_path);
  if (noise.mlc_bits != mlc_bits) {
    throw hetq::ConfigError("noise model is for " + std::to_string(noise.mlc_bits) + "-bit MLC but --mlc-bits is " +
                            std::to_string(mlc_bits));
  }
  if (seed) noise.seed = *seed;
  return noise;
}

hetq::memsys::SystemConfig resolve_config(const std::string& path) {
  return path.empty() ? hetq::memsys::SystemConfig{} : hetq::config::load_system_config(path);
}

struct QuantizeArgs {
  std::string in, out, noise;
  double rho = 0.3;
  int inlier_bits = 3, outlier_bits = 5, mlc_bits = 3, grid_points = 128;
  std::optional<std::uint64_t> seed;
};

int cmd_quantize(const QuantizeArgs& a, Manifest& m) {
  auto noise = resolve_noise(a.noise, a.mlc_bits, a.seed);
  hetq::QuantizeOptions opt{a.rho, hetq::QuantizerSpec::of(a.inlier_bits), hetq::QuantizerSpec::of(a.outlier_bits),
                            noise, hetq::ScaleSearchConfig{a.grid_points, 0.3, 1.0}};
  opt.validate();
  const auto tensors = hetq::store::load_qmt(a.in);

  std::vector<hetq::QuantizedTensor> quantized;
  Json per_tensor = Json::array();
  double total_err = 0.0, total_bits = 0.0, total_meta = 0.0, total_n = 0.0;
  for (const auto& t : tensors) {
    auto q = hetq::quantize_tensor(t, opt);
    const double err = hetq::reconstruction_error(t, q);
    const double n = static_cast<double>(t.size());
    const double bpw = hetq::payload_bits_per_weight(q);
    const double meta = hetq::metadata_bits_per_weight(q);
    per_tensor.push_back(Json{{"name", t.name},
                              {"elements", t.size()},
                              {"outliers", q.outlier_indices.size()},
                              {"mse", err / n},
                              {"bits_per_weight", bpw},
                              {"metadata_bits_per_weight", meta},
                              {"compression", 16.0 / bpw}});
    total_err += err;
    total_bits += bpw * n;
    total_meta += meta * n;
    total_n += n;
    quantized.push_back(std::move(q));
  }
  hetq::store::save_qmq(a.out, quantized);

  const double bpw = total_n > 0 ? total_bits / total_n : 0.0;
  Json summary{{"command", "quantize"},
               {"rho", a.rho},
               {"inlier_bits", a.inlier_bits},
               {"outlier_bits", a.outlier_bits},
               {"mlc_bits", a.mlc_bits},
               {"noise", hetq::report::to_json(noise)},
               {"tensors", std::move(per_tensor)},
               {"total",
                {{"elements", total_n},
                 {"mse", total_n > 0 ? total_err / total_n : 0.0},
                 {"bits_per_weight", bpw},
                 {"metadata_bits_per_weight", total_n > 0 ? total_meta / total_n : 0.0},
                 {"compression", bpw > 0 ? 16.0 / bpw : 0.0}}}};
  m.seed = noise.seed;
  m.config = Json{{"rho", a.rho},
                  {"inlier_bits", a.inlier_bits},
                  {"outlier_bits", a.outlier_bits},
                  {"mlc_bits", a.mlc_bits},
                  {"grid_points", a.grid_points},
                  {"noise", hetq::report::to_json(noise)}};
  m.inputs = {a.in};
  m.outputs = {a.out};
  write_manifest(a.out, m);
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

int cmd_report(const std::string& config_path, const std::string& out, Manifest& m) {
  const auto cfg = resolve_config(config_path);
  const auto report = hetq::memsys::cost_report(cfg);
  m.config = hetq::report::to_json(cfg);
  if (!config_path.empty()) m.inputs = {config_path};
  Json doc{{"config", m.config}, {"report", hetq::report::to_json(report)}};
  emit(out, doc.dump(2) + "\n", m);
  return kOk;
}

int cmd_dse(const std::string& config_path, std::optional<double> budget, const std::string& out, Manifest& m) {
  auto cfg = resolve_config(config_path);
  if (budget) cfg.power_budget_mw = *budget;
  cfg.validate();
  m.config = hetq::report::to_json(cfg);
  if (!config_path.empty()) m.inputs = {config_path};
  const auto result = hetq::memsys::explore_bandwidth(cfg);
  emit(out, hetq::report::to_json(result, cfg.power_budget_mw).dump(2) + "\n", m);
  return kOk;
}

struct SweepArgs {
  std::string config, in, noise, out, rhos = "0.1,0.2,0.3,0.4,0.5";
  std::uint64_t seed = 0;
  int grid_points = 128;
};

int cmd_sweep(const SweepArgs& a, Manifest& m) {
  const auto cfg = resolve_config(a.config);
  const auto rhos = parse_rho_list(a.rhos);
  // mlc_bits = 1 describes a plain DRAM-like store with no MLC read noise.
  auto noise = cfg.mlc_bits == 1 && a.noise.empty() ? hetq::NoiseModel::noiseless()
                                                    : resolve_noise(a.noise, cfg.mlc_bits, a.seed);
  noise.seed = a.seed;
  const auto tensors = a.in.empty() ? hetq::synthetic_model(4, 64, 256, a.seed) : hetq::store::load_qmt(a.in);
  const auto rows = hetq::sweep_rho(cfg, rhos, tensors, noise, hetq::ScaleSearchConfig{a.grid_points, 0.3, 1.0});
  m.seed = a.seed;
  m.config = Json{{"system", hetq::report::to_json(cfg)},
                  {"rhos", rhos},
                  {"noise", hetq::report::to_json(noise)},
                  {"grid_points", a.grid_points},
                  {"tensors", a.in.empty() ? "synthetic:4x64x256" : a.in}};
  if (!a.config.empty()) m.inputs.push_back(a.config);
  if (!a.in.empty()) m.inputs.push_back(a.in);
  emit(a.out, hetq::report::sweep_csv(rows), m);
  return kOk;
}

struct InjectArgs {
  std::string in, out, noise, mode = "code";
  int mlc_bits = 3;
  std::uint64_t seed = 0;
};

int cmd_inject(const InjectArgs& a, Manifest& m) {
  const auto noise = resolve_noise(a.noise, a.mlc_bits, a.seed);
  const auto mode = a.mode == "cell" ? hetq::noise::InjectMode::cell : hetq::noise::InjectMode::code;
  if (mode == hetq::noise::InjectMode::cell && noise.mlc_bits != 2) {
    throw hetq::ConfigError("--mode cell stores 3-bit codes in 2-bit cells; use --mlc-bits 2");
  }
  const auto tensors = hetq::store::load_qmq(a.in);
  std::vector<hetq::QuantizedTensor> out;
  Json per_tensor = Json::array();
  hetq::noise::InjectStats total;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto model = noise;
    model.seed = hetq::derive_seed(noise.seed, i);
    hetq::noise::InjectStats stats;
    out.push_back(hetq::noise::inject(tensors[i], model, mode, &stats));
    per_tensor.push_back(Json{{"name", tensors[i].name}, {"inlier_codes", stats.codes}, {"changed", stats.changed}});
    total.codes += stats.codes;
    total.changed += stats.changed;
  }
  hetq::store::save_qmq(a.out, out);
  m.seed = a.seed;
  m.config = Json{{"mode", a.mode}, {"noise", hetq::report::to_json(noise)}};
  m.inputs = {a.in};
  m.outputs = {a.out};
  write_manifest(a.out, m);
  Json summary{{"command", "inject"},
               {"mode", a.mode},
               {"seed", a.seed},
               {"tensors", std::move(per_tensor)},
               {"total",
                {{"inlier_codes", total.codes},
                 {"changed", total.changed},
                 {"changed_fraction",
                  total.codes ? static_cast<double>(total.changed) / static_cast<double>(total.codes) : 0.0}}}};
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

int cmd_synth(const std::string& out, std::size_t count, std::size_t rows, std::size_t cols, std::uint64_t seed,
              Manifest& m) {
  const auto tensors = hetq::synthetic_model(count, rows, cols, seed);
  hetq::store::save_qmt(out, tensors);
  m.seed = seed;
  m.config = Json{{"tensors", count}, {"rows", rows}, {"cols", cols}};
  m.outputs = {out};
  write_manifest(out, m);
  return kOk;
}

int run(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) throw hetq::IoError("cannot open manifest " + manifest_file);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw hetq::FormatError(std::string("malformed manifest: ") + e.what());
  }
  if (!j.contains("args") || !j["args"].is_array()) throw hetq::FormatError("manifest lacks an args array");
  auto args = j["args"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw hetq::FormatError("manifest cannot replay itself");
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Outlier-aware dual-precision quantization and heterogeneous NVM cost model", "hetq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Manifest manifest;
  manifest.args = args;

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Quantize a QMT file into a QMQ file");
  quantize->add_option("--in", qa.in, "Input QMT file")->required();
  quantize->add_option("--out", qa.out, "Output QMQ file")->required();
  quantize->add_option("--rho", qa.rho, "Outlier ratio")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  quantize->add_option("--inlier-bits", qa.inlier_bits)->check(CLI::Range(2, 16))->capture_default_str();
  quantize->add_option("--outlier-bits", qa.outlier_bits)->check(CLI::Range(2, 16))->capture_default_str();
  quantize->add_option("--mlc-bits", qa.mlc_bits, "ReRAM cell mode for the noise model")
      ->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  quantize->add_option("--grid-points", qa.grid_points)->check(CLI::Range(2, 1 << 20))->capture_default_str();
  quantize->add_option("--noise", qa.noise, "Noise model file");
  quantize->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { qa.seed = s; }, "Random seed");

  std::string report_config, report_out;
  auto* report = app.add_subcommand("report", "Print the cost report for a system config");
  report->add_option("--config", report_config, "System config file (defaults built in)");
  report->add_option("--out", report_out, "Write JSON here instead of stdout");

  std::string dse_config, dse_out;
  std::optional<double> dse_budget;
  auto* dse = app.add_subcommand("dse", "Explore MRAM/ReRAM bandwidth allocations");
  dse->add_option("--config", dse_config, "System config file");
  dse->add_option_function<double>("--power-budget", [&](double b) { dse_budget = b; }, "Override power budget (mW)");
  dse->add_option("--out", dse_out, "Write JSON here instead of stdout");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Sweep the outlier ratio");
  sweep->add_option("--config", sa.config, "System config file");
  sweep->add_option("--rho", sa.rhos, "Comma-separated outlier ratios")->capture_default_str();
  sweep->add_option("--in", sa.in, "QMT tensors (synthetic if omitted)");
  sweep->add_option("--noise", sa.noise, "Noise model file");
  sweep->add_option("--seed", sa.seed)->capture_default_str();
  sweep->add_option("--grid-points", sa.grid_points)->check(CLI::Range(2, 1 << 20))->capture_default_str();
  sweep->add_option("--out", sa.out, "Write CSV here instead of stdout");

  InjectArgs ia;
  auto* inject = app.add_subcommand("inject", "Apply ReRAM read noise to QMQ inlier codes");
  inject->add_option("--in", ia.in, "Input QMQ file")->required();
  inject->add_option("--out", ia.out, "Output QMQ file")->required();
  inject->add_option("--mode", ia.mode, "code: +/-1 level; cell: 2-bit cell packing")
      ->check(CLI::IsMember({"code", "cell"}))
      ->capture_default_str();
  inject->add_option("--mlc-bits", ia.mlc_bits)->check(CLI::IsMember({2, 3}))->capture_default_str();
  inject->add_option("--noise", ia.noise, "Noise model file");
  inject->add_option("--seed", ia.seed)->capture_default_str();

  std::string synth_out;
  std::size_t synth_count = 4, synth_rows = 64, synth_cols = 256;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic heavy-tailed QMT file");
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--tensors", synth_count)->check(CLI::Range(1, 1 << 16))->capture_default_str();
  synth->add_option("--rows", synth_rows)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  synth->add_option("--cols", synth_cols)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();

  std::string replay_manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("manifest", replay_manifest)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*quantize) {
      manifest.command = "quantize";
      return cmd_quantize(qa, manifest);
    }
    if (*report) {
      manifest.command = "report";
      return cmd_report(report_config, report_out, manifest);
    }
    if (*dse) {
      manifest.command = "dse";
      return cmd_dse(dse_config, dse_budget, dse_out, manifest);
    }
    if (*sweep) {
      manifest.command = "sweep";
      return cmd_sweep(sa, manifest);
    }
    if (*inject) {
      manifest.command = "inject";
      return cmd_inject(ia, manifest);
    }
    if (*synth) {
      manifest.command = "synth";
      return cmd_synth(synth_out, synth_count, synth_rows, synth_cols, synth_seed, manifest);
    }
    if (*replay) return cmd_replay(replay_manifest);
  } catch (const hetq::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const hetq::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const hetq::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kFormat;
  } catch (const hetq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
