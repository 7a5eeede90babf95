// Quantizes a synthetic layer at several outlier ratios, simulates ReRAM read
// noise on the inliers, and prints the matching memory-system figures.

#include <cstdio>

#include "hetq/hetq.hpp"

int main() {
  const auto layer = hetq::synthetic_laplace("proj.weight", 128, 512, 42);
  const auto noise = hetq::NoiseModel::defaults(3, 7);

  std::printf("%6s %12s %12s %12s %10s\n", "rho", "clean_mse", "noisy_mse", "bits/w", "energy_x");
  for (double rho : {0.0, 0.1, 0.3, 0.5}) {
    hetq::QuantizeOptions opt;
    opt.rho = rho;
    opt.noise = noise;
    const auto q = hetq::quantize_tensor(layer, opt);
    const auto noisy = hetq::noise::inject(q, noise, hetq::noise::InjectMode::code);

    hetq::memsys::SystemConfig cfg;
    cfg.rho = rho;
    const auto cost = hetq::memsys::cost_report(cfg);

    const double n = static_cast<double>(layer.size());
    std::printf("%6.2f %12.4e %12.4e %12.3f %10.2f\n", rho, hetq::reconstruction_error(layer, q) / n,
                hetq::reconstruction_error(layer, noisy) / n, hetq::payload_bits_per_weight(q), cost.energy_reduction);
  }
  return 0;
}
