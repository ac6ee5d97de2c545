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

#include <string>

#include "byte_io.hpp"
#include "lungprep/inflate3d.hpp"
#include "lungprep/lvol.hpp"

namespace lungprep {
namespace {

std::vector<std::uint8_t> encode(std::span<const std::uint32_t> shape, std::span<const float> weights,
                                 std::span<const float> bias) {
  detail::ByteWriter w;
  w.put_bytes("LVW1");
  w.put_u32(static_cast<std::uint32_t>(shape.size()));
  for (auto s : shape) w.put_u32(s);
  for (float v : weights) w.put_f32(v);
  for (float v : bias) w.put_f32(v);
  return w.take();
}

void check_sizes(std::size_t weights, std::size_t expected, std::size_t bias, std::size_t cout) {
  if (weights != expected || bias != cout) {
    throw Error(ErrorCode::ShapeMismatch, "kernel storage does not match its shape");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_lvw(const Kernel2D<float>& k) {
  check_sizes(k.weights.size(), k.kh * k.kw * k.cin * k.cout, k.bias.size(), k.cout);
  const std::uint32_t shape[] = {static_cast<std::uint32_t>(k.kh), static_cast<std::uint32_t>(k.kw),
                                 static_cast<std::uint32_t>(k.cin), static_cast<std::uint32_t>(k.cout)};
  return encode(shape, k.weights, k.bias);
}

std::vector<std::uint8_t> encode_lvw(const Kernel3D<float>& k) {
  check_sizes(k.weights.size(), k.kt * k.slice_size(), k.bias.size(), k.cout);
  const std::uint32_t shape[] = {static_cast<std::uint32_t>(k.kt), static_cast<std::uint32_t>(k.kh),
                                 static_cast<std::uint32_t>(k.kw), static_cast<std::uint32_t>(k.cin),
                                 static_cast<std::uint32_t>(k.cout)};
  return encode(shape, k.weights, k.bias);
}

AnyKernel decode_lvw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::string(bytes.begin(), bytes.begin() + 4) != "LVW1") {
    throw Error(ErrorCode::BadMagic, "not an LVW1 file");
  }
  if (bytes.size() < 8) throw Error(ErrorCode::TruncatedPayload, "missing rank");
  const std::uint32_t rank = detail::load_u32(bytes.data() + 4);
  if (rank != 4 && rank != 5) {
    throw Error(ErrorCode::UnsupportedVersion, "LVW rank " + std::to_string(rank) + " (expected 4 or 5)");
  }
  if (bytes.size() < 8 + 4 * static_cast<std::size_t>(rank)) throw Error(ErrorCode::TruncatedPayload, "missing shape");
  std::vector<std::size_t> shape(rank);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape[i] = detail::load_u32(bytes.data() + 8 + 4 * i);
    count *= shape[i];
  }
  const std::size_t cout = shape.back();
  const std::size_t header = 8 + 4 * rank;
  if (bytes.size() - header < 4 * (count + cout)) {
    throw Error(ErrorCode::TruncatedPayload, "weight payload shorter than the declared shape");
  }
  auto read_floats = [&](std::size_t first, std::size_t n) {
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::load_f32(bytes.data() + header + 4 * (first + i));
    return out;
  };
  if (rank == 4) {
    Kernel2D<float> k(shape[0], shape[1], shape[2], shape[3]);
    k.weights = read_floats(0, count);
    k.bias = read_floats(count, cout);
    return k;
  }
  Kernel3D<float> k(shape[0], shape[1], shape[2], shape[3], shape[4]);
  k.weights = read_floats(0, count);
  k.bias = read_floats(count, cout);
  return k;
}

void write_lvw(const std::filesystem::path& path, const AnyKernel& k) {
  std::visit([&](const auto& kernel) { write_file_bytes(path, encode_lvw(kernel)); }, k);
}

AnyKernel read_lvw(const std::filesystem::path& path) { return decode_lvw(read_file_bytes(path)); }

}  // namespace lungprep
