/*
 * Copyright 2026 The lungprep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lungprep/lvol.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "byte_io.hpp"
#include "lungprep/error.hpp"

namespace lungprep {
namespace {

template <typename T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<std::uint8_t>() { return DType::U8; }
template <>
constexpr DType dtype_of<std::int16_t>() { return DType::I16; }
template <>
constexpr DType dtype_of<float>() { return DType::F32; }

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::U8: return 1;
    case DType::I16: return 2;
    case DType::F32: return 4;
  }
  return 0;
}

template <typename T>
std::vector<std::uint8_t> encode(const Volume<T>& volume) {
  if (volume.voxels.size() != volume.dims.count()) {
    throw Error(ErrorCode::ShapeMismatch, "voxel count does not match dims");
  }
  detail::ByteWriter w;
  w.bytes().reserve(kLvolHeaderSize + volume.voxels.size() * sizeof(T));
  w.put_bytes("LVOL");
  w.put_u8(kLvolVersion);
  w.put_u8(static_cast<std::uint8_t>(dtype_of<T>()));
  w.put_u32(static_cast<std::uint32_t>(volume.dims.depth));
  w.put_u32(static_cast<std::uint32_t>(volume.dims.height));
  w.put_u32(static_cast<std::uint32_t>(volume.dims.width));
  w.put_f32(static_cast<float>(volume.spacing.dz));
  w.put_f32(static_cast<float>(volume.spacing.dy));
  w.put_f32(static_cast<float>(volume.spacing.dx));
  for (T v : volume.voxels) {
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      w.put_u8(v);
    } else if constexpr (std::is_same_v<T, std::int16_t>) {
      w.put_u16(static_cast<std::uint16_t>(v));
    } else {
      w.put_f32(v);
    }
  }
  return w.take();
}

template <typename T>
Volume<T> decode_payload(Dims dims, Spacing spacing, const std::uint8_t* p) {
  Volume<T> out(dims, spacing);
  for (std::size_t i = 0; i < out.voxels.size(); ++i) {
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      out.voxels[i] = p[i];
    } else if constexpr (std::is_same_v<T, std::int16_t>) {
      out.voxels[i] = static_cast<std::int16_t>(detail::load_u16(p + 2 * i));
    } else {
      out.voxels[i] = detail::load_f32(p + 4 * i);
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_lvol(const PreprocessedTensor& volume) { return encode(volume); }
std::vector<std::uint8_t> encode_lvol(const HuVolume& volume) { return encode(volume); }
std::vector<std::uint8_t> encode_lvol(const FloatVolume& volume) { return encode(volume); }

AnyVolume decode_lvol(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::string(bytes.begin(), bytes.begin() + 4) != "LVOL") {
    throw Error(ErrorCode::BadMagic, "not an LVOL file");
  }
  if (bytes.size() < kLvolHeaderSize) {
    throw Error(ErrorCode::TruncatedPayload, "header shorter than 30 bytes");
  }
  const std::uint8_t* p = bytes.data();
  if (p[4] != kLvolVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "LVOL version " + std::to_string(p[4]));
  }
  const auto dtype = static_cast<DType>(p[5]);
  if (p[5] < 1 || p[5] > 3) {
    throw Error(ErrorCode::WrongDtype, "unknown dtype code " + std::to_string(p[5]));
  }
  const Dims dims{detail::load_u32(p + 6), detail::load_u32(p + 10), detail::load_u32(p + 14)};
  const Spacing spacing{detail::load_f32(p + 18), detail::load_f32(p + 22), detail::load_f32(p + 26)};
  const std::size_t payload = dims.count() * dtype_size(dtype);
  if (bytes.size() - kLvolHeaderSize < payload) {
    throw Error(ErrorCode::TruncatedPayload, "header declares " + std::to_string(dims.count()) +
                                                 " voxels but payload has " +
                                                 std::to_string(bytes.size() - kLvolHeaderSize) + " bytes");
  }
  const std::uint8_t* body = p + kLvolHeaderSize;
  switch (dtype) {
    case DType::U8: return decode_payload<std::uint8_t>(dims, spacing, body);
    case DType::I16: return decode_payload<std::int16_t>(dims, spacing, body);
    case DType::F32: return decode_payload<float>(dims, spacing, body);
  }
  throw Error(ErrorCode::WrongDtype, "unreachable");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

void write_lvol(const std::filesystem::path& path, const PreprocessedTensor& volume) {
  write_file_bytes(path, encode_lvol(volume));
}
void write_lvol(const std::filesystem::path& path, const HuVolume& volume) {
  write_file_bytes(path, encode_lvol(volume));
}
void write_lvol(const std::filesystem::path& path, const FloatVolume& volume) {
  write_file_bytes(path, encode_lvol(volume));
}

AnyVolume read_lvol(const std::filesystem::path& path) { return decode_lvol(read_file_bytes(path)); }

float normalize_u8(std::uint8_t v) {
  return static_cast<float>(static_cast<double>(v) / 255.0 * 2.0 - 1.0);
}

TriChannelTensor expand_trichannel(const PreprocessedTensor& tensor) {
  TriChannelTensor out{tensor.dims, tensor.spacing, {}};
  const std::size_t n = tensor.voxels.size();
  out.data.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) out.data[i] = normalize_u8(tensor.voxels[i]);
  std::copy_n(out.data.begin(), n, out.data.begin() + n);
  std::copy_n(out.data.begin(), n, out.data.begin() + 2 * n);
  return out;
}

TriChannelTensor load_tensor_trichannel(const std::filesystem::path& path) {
  AnyVolume v = read_lvol(path);
  auto* u8 = std::get_if<PreprocessedTensor>(&v);
  if (u8 == nullptr) throw Error(ErrorCode::WrongDtype, path.string() + " does not hold a u8 tensor");
  return expand_trichannel(*u8);
}

}  // namespace lungprep
