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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lungprep {

/// Grid extent in (depth, height, width) order.
struct Dims {
  std::size_t depth = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t count() const { return depth * height * width; }
  std::size_t operator[](std::size_t axis) const {
    return axis == 0 ? depth : (axis == 1 ? height : width);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Physical voxel size in millimetres, (dz, dy, dx).
struct Spacing {
  double dz = 1.0;
  double dy = 1.0;
  double dx = 1.0;

  double operator[](std::size_t axis) const { return axis == 0 ? dz : (axis == 1 ? dy : dx); }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// Integer voxel coordinate (z, y, x). Signed so that crop origins may fall
/// outside the grid.
struct Index3 {
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;
  friend bool operator==(const Index3&, const Index3&) = default;
};

inline constexpr std::int16_t kMinHu = -1024;
inline constexpr std::int16_t kMaxHu = 3071;

/// Dense depth-major voxel grid.
template <typename T>
struct Volume {
  using value_type = T;

  Dims dims;
  Spacing spacing;
  std::vector<T> voxels;

  Volume() = default;
  Volume(Dims d, Spacing s, T fill = T{}) : dims(d), spacing(s), voxels(d.count(), fill) {}
  Volume(Dims d, Spacing s, std::vector<T> v) : dims(d), spacing(s), voxels(std::move(v)) {}

  std::size_t offset(std::size_t z, std::size_t y, std::size_t x) const {
    return (z * dims.height + y) * dims.width + x;
  }
  T& at(std::size_t z, std::size_t y, std::size_t x) { return voxels[offset(z, y, x)]; }
  const T& at(std::size_t z, std::size_t y, std::size_t x) const { return voxels[offset(z, y, x)]; }

  bool contains(const Index3& i) const {
    return i.z >= 0 && i.y >= 0 && i.x >= 0 && static_cast<std::size_t>(i.z) < dims.depth &&
           static_cast<std::size_t>(i.y) < dims.height && static_cast<std::size_t>(i.x) < dims.width;
  }

  friend bool operator==(const Volume&, const Volume&) = default;
};

/// Calibrated Hounsfield-unit volume, values in [kMinHu, kMaxHu].
using HuVolume = Volume<std::int16_t>;
/// Windowed, quantized volume; the on-disk model input.
using PreprocessedTensor = Volume<std::uint8_t>;
using FloatVolume = Volume<float>;

/// Round half away from zero, then clamp to the 12-bit CT range.
inline std::int16_t to_hu(double value) {
  const double r = std::round(value);
  if (r < kMinHu) return kMinHu;
  if (r > kMaxHu) return kMaxHu;
  return static_cast<std::int16_t>(r);
}

/// Boolean voxel grid. Stored as bytes (0/1); spacing is carried along so a
/// mask can be related back to its source volume.
struct Mask : Volume<std::uint8_t> {
  using Volume::Volume;

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto b : voxels) n += b != 0;
    return n;
  }
};

}  // namespace lungprep
