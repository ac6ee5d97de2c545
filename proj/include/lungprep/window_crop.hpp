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

#include <algorithm>
#include <cstdint>

#include "lungprep/volume.hpp"

namespace lungprep {

inline constexpr int kDefaultWindowLoHu = -1000;
inline constexpr int kDefaultWindowHiHu = 400;
inline constexpr std::size_t kDefaultCropSize = 160;

/// Maps one HU value into the 8-bit window: clamp to [lo, hi], then
/// round((v - lo) / (hi - lo) * 255) half away from zero.
std::uint8_t window_value(int hu, int lo_hu, int hi_hu);

/// Applies window_value() voxelwise. Throws InvalidWindow when lo >= hi.
PreprocessedTensor window_hu(const HuVolume& volume, int lo_hu = kDefaultWindowLoHu,
                             int hi_hu = kDefaultWindowHiHu);

/// Extracts a block of exactly `size` voxels whose output index o reads input
/// index center - floor(size / 2) + o; reads outside the input yield `pad`.
template <typename T>
Volume<T> crop_centered(const Volume<T>& volume, const Index3& center, const Dims& size, T pad) {
  Volume<T> out(size, volume.spacing, pad);
  const Index3 origin{center.z - static_cast<std::int64_t>(size.depth / 2),
                      center.y - static_cast<std::int64_t>(size.height / 2),
                      center.x - static_cast<std::int64_t>(size.width / 2)};
  // Clip the x run once per row; z and y are checked per row.
  const std::int64_t x_begin = std::max<std::int64_t>(0, -origin.x);
  const std::int64_t x_end = std::min<std::int64_t>(static_cast<std::int64_t>(size.width),
                                                    static_cast<std::int64_t>(volume.dims.width) - origin.x);
  for (std::size_t z = 0; z < size.depth; ++z) {
    const std::int64_t iz = origin.z + static_cast<std::int64_t>(z);
    if (iz < 0 || iz >= static_cast<std::int64_t>(volume.dims.depth)) continue;
    for (std::size_t y = 0; y < size.height; ++y) {
      const std::int64_t iy = origin.y + static_cast<std::int64_t>(y);
      if (iy < 0 || iy >= static_cast<std::int64_t>(volume.dims.height)) continue;
      for (std::int64_t x = x_begin; x < x_end; ++x) {
        out.at(z, y, static_cast<std::size_t>(x)) = volume.at(iz, iy, origin.x + x);
      }
    }
  }
  return out;
}

}  // namespace lungprep
