#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hetq/rng.hpp"
#include "hetq/tensor.hpp"

namespace hetq {

/// Heavy-tailed (Laplace) weight matrix [rows, cols] with channel axis 0,
/// reproducible across platforms for a given seed.
inline WeightTensor synthetic_laplace(std::string name, std::size_t rows, std::size_t cols, std::uint64_t seed,
                                      double scale = 0.02) {
  Rng rng(seed);
  WeightTensor t{std::move(name), {rows, cols}, 0, std::vector<float>(rows * cols)};
  for (auto& v : t.data) {
    double r = rng.uniform();
    while (r == 0.0) r = rng.uniform();
    const double u = r - 0.5;
    const double mag = -scale * std::log1p(-2.0 * std::abs(u));
    v = static_cast<float>(u < 0.0 ? -mag : mag);
  }
  return t;
}

/// A small stack of projection-like matrices.
inline std::vector<WeightTensor> synthetic_model(std::size_t tensors, std::size_t rows, std::size_t cols,
                                                 std::uint64_t seed) {
  std::vector<WeightTensor> out;
  out.reserve(tensors);
  for (std::size_t i = 0; i < tensors; ++i) {
    out.push_back(synthetic_laplace("layer" + std::to_string(i) + ".weight", rows, cols, derive_seed(seed, i)));
  }
  return out;
}

}  // namespace hetq
