#pragma once

// QMT (float tensors) and QMQ (dual-precision quantized tensors) containers.
// All multi-byte integers and floats are little-endian.
//
//   QMT1: "QMT1" u32 version=1 u32 count
//         { u32 name_len, name, u8 ndim, u8 channel_axis, u64 dims[ndim], f32 data[prod(dims)] }*
//   QMQ1: "QMQ1" u32 version=1 u32 count
//         { u32 name_len, name, u8 ndim, u8 channel_axis, u64 dims[ndim],
//           u8 inlier_bits, u8 outlier_bits, f32 rho,
//           f32 inlier_scales[C], f32 outlier_scales[C],
//           u64 outlier_count, u64 outlier_indices[outlier_count],
//           packed inlier codes, packed outlier codes }*
//
// Code streams are offset-binary, LSB-first, each starting on a byte boundary.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetq/bitpack.hpp"
#include "hetq/error.hpp"
#include "hetq/tensor.hpp"

namespace hetq::store {

inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::string_view kQmtMagic = "QMT1";
inline constexpr std::string_view kQmqMagic = "QMQ1";

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace detail {

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename T>
  void put(T v) {
    raw(&v, sizeof(T));
  }
  void str(std::string_view s) { raw(s.data(), s.size()); }
  void f32s(std::span<const float> v) { raw(v.data(), v.size_bytes()); }
  void bytes(std::span<const std::uint8_t> v) { raw(v.data(), v.size()); }

  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > data_.size() - pos_) throw FormatError("truncated container: need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)).data(), sizeof(T));
    return v;
  }
  std::vector<float> f32s(std::size_t n) {
    if (n > (data_.size() - pos_) / sizeof(float)) throw FormatError("truncated container: float payload");
    std::vector<float> v(n);
    std::memcpy(v.data(), take(n * sizeof(float)).data(), n * sizeof(float));
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline void write_header(ByteWriter& w, std::string_view magic, std::size_t count) {
  w.str(magic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(count));
}

inline std::uint32_t read_header(ByteReader& r, std::string_view magic) {
  auto m = r.take(4);
  if (std::string_view(reinterpret_cast<const char*>(m.data()), 4) != magic) {
    throw FormatError("bad magic: expected " + std::string(magic));
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw FormatError("unsupported container version " + std::to_string(version));
  return r.get<std::uint32_t>();
}

inline void write_shape(ByteWriter& w, const std::string& name, const std::vector<std::uint64_t>& dims,
                        std::size_t channel_axis) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
  w.str(name);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(dims.size()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(channel_axis));
  for (auto d : dims) w.put<std::uint64_t>(d);
}

struct Shape {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::size_t channel_axis = 0;
};

inline Shape read_shape(ByteReader& r) {
  Shape s;
  const auto name_len = r.get<std::uint32_t>();
  auto nb = r.take(name_len);
  s.name.assign(reinterpret_cast<const char*>(nb.data()), nb.size());
  const auto ndim = r.get<std::uint8_t>();
  s.channel_axis = r.get<std::uint8_t>();
  s.dims.resize(ndim);
  for (auto& d : s.dims) d = r.get<std::uint64_t>();
  // Shape errors in a file are format errors, not caller mistakes.
  try {
    validate_shape(s.name, s.dims, s.channel_axis);
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  return s;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_qmt(std::span<const WeightTensor> tensors) {
  detail::ByteWriter w;
  detail::write_header(w, kQmtMagic, tensors.size());
  for (const auto& t : tensors) {
    t.validate();
    detail::write_shape(w, t.name, t.dims, t.channel_axis);
    w.f32s(t.data);
  }
  return w.take();
}

inline std::vector<WeightTensor> decode_qmt(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto count = detail::read_header(r, kQmtMagic);
  std::vector<WeightTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto shape = detail::read_shape(r);
    WeightTensor t{std::move(shape.name), std::move(shape.dims), shape.channel_axis, {}};
    t.data = r.f32s(element_count(t.dims));
    t.validate();
    out.push_back(std::move(t));
  }
  if (!r.done()) throw FormatError("trailing bytes after last tensor");
  return out;
}

inline std::vector<std::uint8_t> encode_qmq(std::span<const QuantizedTensor> tensors) {
  detail::ByteWriter w;
  detail::write_header(w, kQmqMagic, tensors.size());
  for (const auto& q : tensors) {
    q.validate();
    detail::write_shape(w, q.name, q.dims, q.channel_axis);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(q.inlier_bits));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(q.outlier_bits));
    w.put<float>(q.rho);
    w.f32s(q.inlier_scales);
    w.f32s(q.outlier_scales);
    w.put<std::uint64_t>(q.outlier_indices.size());
    for (auto i : q.outlier_indices) w.put<std::uint64_t>(i);
    w.bytes(bitpack::pack(q.inlier_codes, q.inlier_bits));
    w.bytes(bitpack::pack(q.outlier_codes, q.outlier_bits));
  }
  return w.take();
}

inline std::vector<QuantizedTensor> decode_qmq(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto count = detail::read_header(r, kQmqMagic);
  std::vector<QuantizedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto shape = detail::read_shape(r);
    QuantizedTensor q;
    q.name = std::move(shape.name);
    q.dims = std::move(shape.dims);
    q.channel_axis = shape.channel_axis;
    q.inlier_bits = r.get<std::uint8_t>();
    q.outlier_bits = r.get<std::uint8_t>();
    if (q.inlier_bits < 2 || q.inlier_bits > 16 || q.outlier_bits < 2 || q.outlier_bits > 16) {
      throw FormatError("tensor '" + q.name + "': bit-width outside [2,16]");
    }
    q.rho = r.get<float>();
    const auto channels = q.layout().channels;
    q.inlier_scales = r.f32s(channels);
    q.outlier_scales = r.f32s(channels);
    const auto n = q.size();
    const auto n_out = r.get<std::uint64_t>();
    if (n_out > n) throw FormatError("tensor '" + q.name + "': outlier count exceeds element count");
    q.outlier_indices.resize(n_out);
    for (auto& idx : q.outlier_indices) idx = r.get<std::uint64_t>();
    const auto n_in = n - n_out;
    q.inlier_codes = bitpack::unpack(r.take(bitpack::packed_size(n_in, q.inlier_bits)), n_in, q.inlier_bits);
    q.outlier_codes = bitpack::unpack(r.take(bitpack::packed_size(n_out, q.outlier_bits)), n_out, q.outlier_bits);
    q.validate();
    out.push_back(std::move(q));
  }
  if (!r.done()) throw FormatError("trailing bytes after last tensor");
  return out;
}

inline std::vector<WeightTensor> load_qmt(const std::filesystem::path& path) {
  return decode_qmt(detail::read_file(path));
}

inline void save_qmt(const std::filesystem::path& path, std::span<const WeightTensor> tensors) {
  detail::write_file(path, encode_qmt(tensors));
}

inline std::vector<QuantizedTensor> load_qmq(const std::filesystem::path& path) {
  return decode_qmq(detail::read_file(path));
}

inline void save_qmq(const std::filesystem::path& path, std::span<const QuantizedTensor> tensors) {
  detail::write_file(path, encode_qmq(tensors));
}

}  // namespace hetq::store
