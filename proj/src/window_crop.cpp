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

#include "lungprep/window_crop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lungprep/error.hpp"

namespace lungprep {

std::uint8_t window_value(int hu, int lo_hu, int hi_hu) {
  const int clipped = std::clamp(hu, lo_hu, hi_hu);
  const double scaled = static_cast<double>(clipped - lo_hu) / static_cast<double>(hi_hu - lo_hu) * 255.0;
  return static_cast<std::uint8_t>(std::round(scaled));
}

PreprocessedTensor window_hu(const HuVolume& volume, int lo_hu, int hi_hu) {
  if (lo_hu >= hi_hu) {
    throw Error(ErrorCode::InvalidWindow,
                "window [" + std::to_string(lo_hu) + ", " + std::to_string(hi_hu) + "] is empty");
  }
  // Every i16 HU maps through a 4096-entry table over the clamped CT range.
  std::array<std::uint8_t, kMaxHu - kMinHu + 1> lut{};
  for (int hu = kMinHu; hu <= kMaxHu; ++hu) lut[hu - kMinHu] = window_value(hu, lo_hu, hi_hu);

  PreprocessedTensor out(volume.dims, volume.spacing);
  for (std::size_t i = 0; i < volume.voxels.size(); ++i) {
    const int hu = std::clamp<int>(volume.voxels[i], kMinHu, kMaxHu);
    out.voxels[i] = lut[hu - kMinHu];
  }
  return out;
}

}  // namespace lungprep
