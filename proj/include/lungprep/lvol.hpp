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

#pragma once

// LVOL: the on-disk volume container.
//
//   offset  size  field
//   0       4     magic "LVOL"
//   4       1     version (1)
//   5       1     dtype (1 = u8, 2 = i16, 3 = f32)
//   6       12    dims: depth, height, width as u32 little-endian
//   18      12    spacing: dz, dy, dx as f32 little-endian (mm)
//   30      ...   payload, little-endian, depth-major
//
// Preprocessed tensors are stored as u8 and only widened to floats by
// load_tensor_trichannel().

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "lungprep/volume.hpp"

namespace lungprep {

enum class DType : std::uint8_t { U8 = 1, I16 = 2, F32 = 3 };

inline constexpr std::uint8_t kLvolVersion = 1;
inline constexpr std::size_t kLvolHeaderSize = 30;

using AnyVolume = std::variant<PreprocessedTensor, HuVolume, FloatVolume>;

std::vector<std::uint8_t> encode_lvol(const PreprocessedTensor& volume);
std::vector<std::uint8_t> encode_lvol(const HuVolume& volume);
std::vector<std::uint8_t> encode_lvol(const FloatVolume& volume);
AnyVolume decode_lvol(std::span<const std::uint8_t> bytes);

void write_lvol(const std::filesystem::path& path, const PreprocessedTensor& volume);
void write_lvol(const std::filesystem::path& path, const HuVolume& volume);
void write_lvol(const std::filesystem::path& path, const FloatVolume& volume);
AnyVolume read_lvol(const std::filesystem::path& path);

/// Model input: three identical channels of floats in [-1, 1], laid out
/// channel-major then depth-major.
struct TriChannelTensor {
  Dims dims;
  Spacing spacing;
  std::vector<float> data;  // 3 * dims.count()

  std::span<const float> channel(std::size_t c) const {
    return std::span<const float>(data).subspan(c * dims.count(), dims.count());
  }
};

/// v -> v / 255 * 2 - 1, replicated into three channels.
float normalize_u8(std::uint8_t v);
TriChannelTensor expand_trichannel(const PreprocessedTensor& tensor);
TriChannelTensor load_tensor_trichannel(const std::filesystem::path& path);

// Shared little-endian file helpers.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace lungprep
