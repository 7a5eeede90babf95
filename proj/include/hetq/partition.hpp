#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "hetq/error.hpp"
#include "hetq/tensor.hpp"

namespace hetq {

/// Outlier selection for one tensor.
struct PartitionMask {
  std::string tensor_name;
  float tau = std::numeric_limits<float>::infinity();  // smallest selected magnitude; +inf when empty
  std::vector<std::uint64_t> outlier_indices;          // ascending
  double rho = 0.0;

  /// Complement of outlier_indices over [0, n), ascending.
  std::vector<std::uint64_t> inlier_indices(std::size_t n) const {
    std::vector<std::uint64_t> out;
    out.reserve(n - outlier_indices.size());
    std::size_t j = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (j < outlier_indices.size() && outlier_indices[j] == i) {
        ++j;
      } else {
        out.push_back(i);
      }
    }
    return out;
  }
};

inline void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1], got " + std::to_string(rho));
}

/// k = round(rho * n), ties to even.
inline std::size_t outlier_count(double rho, std::size_t n) {
  check_rho(rho);
  return static_cast<std::size_t>(std::nearbyint(rho * static_cast<double>(n)));
}

/// Top-k by magnitude, ties broken by smaller flat index.
inline PartitionMask select_outliers(std::span<const float> values, double rho, std::string name = {}) {
  if (values.empty()) throw ValidationError("select_outliers: empty tensor");
  const std::size_t k = outlier_count(rho, values.size());
  PartitionMask mask;
  mask.tensor_name = std::move(name);
  mask.rho = rho;
  if (k == 0) return mask;

  std::vector<std::uint64_t> order(values.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  const auto before = [&](std::uint64_t a, std::uint64_t b) {
    const float ma = std::abs(values[a]);
    const float mb = std::abs(values[b]);
    return ma != mb ? ma > mb : a < b;
  };
  if (k < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
    mask.tau = std::abs(values[order[k - 1]]);
    order.resize(k);
  } else {
    mask.tau = std::ranges::min(values | std::views::transform([](float v) { return std::abs(v); }));
  }
  std::sort(order.begin(), order.end());
  mask.outlier_indices = std::move(order);
  return mask;
}

inline PartitionMask select_outliers(const WeightTensor& tensor, double rho) {
  return select_outliers(tensor.data, rho, tensor.name);
}

}  // namespace hetq
