#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetq/error.hpp"

namespace hetq::bitpack {

/// Bytes needed for `count` codes of `bits` each: ceil(count*bits/8).
constexpr std::size_t packed_size(std::size_t count, int bits) {
  return (count * static_cast<std::size_t>(bits) + 7) / 8;
}

/// Packs signed codes as offset-binary (code + 2^(bits-1)), LSB-first within
/// each byte. Trailing bits of the last byte are zero.
inline std::vector<std::uint8_t> pack(std::span<const std::int32_t> codes, int bits) {
  if (bits < 1 || bits > 16) throw ValidationError("bit-width outside [1,16]");
  const std::int64_t offset = std::int64_t{1} << (bits - 1);
  const std::uint32_t limit = std::uint32_t{1} << bits;
  std::vector<std::uint8_t> out(packed_size(codes.size(), bits), 0);
  std::size_t bitpos = 0;
  for (auto code : codes) {
    const std::int64_t u = code + offset;
    if (u < 0 || u >= limit) throw ValidationError("code outside the signed range of its bit-width");
    auto v = static_cast<std::uint32_t>(u);
    for (int b = 0; b < bits; ++b, ++bitpos) {
      if ((v >> b) & 1U) out[bitpos / 8] |= static_cast<std::uint8_t>(1U << (bitpos % 8));
    }
  }
  return out;
}

inline std::vector<std::int32_t> unpack(std::span<const std::uint8_t> bytes, std::size_t count, int bits) {
  if (bits < 1 || bits > 16) throw ValidationError("bit-width outside [1,16]");
  if (bytes.size() < packed_size(count, bits)) throw FormatError("packed code stream truncated");
  const std::int32_t offset = std::int32_t{1} << (bits - 1);
  std::vector<std::int32_t> out(count);
  std::size_t bitpos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < bits; ++b, ++bitpos) {
      v |= static_cast<std::uint32_t>((bytes[bitpos / 8] >> (bitpos % 8)) & 1U) << b;
    }
    out[i] = static_cast<std::int32_t>(v) - offset;
  }
  return out;
}

}  // namespace hetq::bitpack
