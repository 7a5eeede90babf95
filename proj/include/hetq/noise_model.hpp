#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetq/error.hpp"

namespace hetq {

using Matrix = std::vector<std::vector<double>>;

/// Read-error model of an MLC ReRAM cell.
///
/// The default form is the adjacent-state model: a stored level reads back one
/// level lower with p_minus, one level higher with p_plus, unchanged with
/// p_zero. An explicit S x S confusion matrix (S = 2^mlc_bits, row = stored
/// state, column = read state) can replace it for cell-level simulation.
struct NoiseModel {
  int mlc_bits = 3;
  double p_minus = 0.0;
  double p_zero = 1.0;
  double p_plus = 0.0;
  std::optional<Matrix> confusion;
  std::uint64_t seed = 0;
  // Set while the probabilities are the shipped placeholders rather than
  // measured device values.
  bool placeholder = false;

  static NoiseModel noiseless(int mlc_bits = 3) {
    NoiseModel m;
    m.mlc_bits = mlc_bits;
    return m;
  }

  static NoiseModel symmetric(int mlc_bits, double p, std::uint64_t seed = 0) {
    NoiseModel m;
    m.mlc_bits = mlc_bits;
    m.p_minus = p;
    m.p_plus = p;
    m.p_zero = 1.0 - 2.0 * p;
    m.seed = seed;
    return m;
  }

  /// Shipped defaults: 2-bit cells are the more reliable mode.
  static NoiseModel defaults(int mlc_bits, std::uint64_t seed = 0) {
    if (mlc_bits != 2 && mlc_bits != 3) throw ConfigError("noise model mlc_bits must be 2 or 3");
    auto m = symmetric(mlc_bits, mlc_bits == 3 ? 0.01 : 0.001, seed);
    m.placeholder = true;
    return m;
  }

  std::size_t states() const { return std::size_t{1} << mlc_bits; }

  /// Aggregate probability of a one-level shift, p_minus + p_plus.
  double flip_probability() const { return p_minus + p_plus; }

  void validate() const {
    if (mlc_bits != 2 && mlc_bits != 3) throw ConfigError("noise model mlc_bits must be 2 or 3");
    for (double p : {p_minus, p_zero, p_plus}) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("noise probabilities must lie in [0,1]");
    }
    if (std::abs(p_minus + p_zero + p_plus - 1.0) > 1e-12) {
      throw ConfigError("p_minus + p_zero + p_plus must equal 1");
    }
    if (confusion) {
      const auto s = states();
      if (confusion->size() != s) throw ConfigError("confusion matrix must have 2^mlc_bits rows");
      for (const auto& row : *confusion) {
        if (row.size() != s) throw ConfigError("confusion matrix must be square");
        double sum = 0.0;
        for (double p : row) {
          if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("confusion matrix entries must lie in [0,1]");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("confusion matrix rows must sum to 1");
      }
    }
  }

  /// Row-stochastic state transition matrix: the explicit confusion matrix if
  /// present, otherwise the adjacent-state model with shifts past the first or
  /// last state folded back into "unchanged".
  Matrix transition_matrix() const {
    if (confusion) return *confusion;
    const auto s = states();
    Matrix m(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
      double stay = p_zero;
      if (i > 0) {
        m[i][i - 1] = p_minus;
      } else {
        stay += p_minus;
      }
      if (i + 1 < s) {
        m[i][i + 1] = p_plus;
      } else {
        stay += p_plus;
      }
      m[i][i] = stay;
    }
    return m;
  }
};

}  // namespace hetq
