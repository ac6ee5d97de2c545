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

#include <cstdint>
#include <vector>

#include "lungprep/volume.hpp"

namespace lungprep {

inline constexpr int kDefaultAirThresholdHu = -320;
inline constexpr int kDefaultCloseRadius = 2;

enum class Connectivity { Six = 6, TwentySix = 26 };

/// Component labels; 0 is background, foreground labels are 1..component_count
/// numbered in scan order of each component's first voxel.
struct LabelMap {
  Dims dims;
  std::vector<std::uint32_t> labels;
  std::uint32_t component_count = 0;
};

/// Axis-aligned inclusive bounds plus the floor midpoint.
struct BBox {
  Index3 min;
  Index3 max;
  Index3 center;
  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Set where HU < threshold.
Mask binarize_air(const HuVolume& volume, int threshold_hu = kDefaultAirThresholdHu);

/// Two-pass union-find labelling.
LabelMap connected_components(const Mask& mask, Connectivity connectivity = Connectivity::Six);

/// Drops components touching any outer face, keeps the (up to) two largest
/// of the rest. Throws SegmentationEmpty when nothing interior remains.
Mask extract_lung_mask(const LabelMap& labels, const Spacing& spacing = {});

/// Offsets of the discrete ball dz^2 + dy^2 + dx^2 <= r^2.
std::vector<Index3> ball_offsets(int radius);

/// Dilation then erosion by the discrete ball. Voxels outside the grid count
/// as unset for both passes, so closing is idempotent but may erode set
/// voxels within `radius` of the border.
Mask morphological_close(const Mask& mask, int radius = kDefaultCloseRadius);
Mask dilate(const Mask& mask, int radius);
Mask erode(const Mask& mask, int radius);

/// Throws EmptyMask when no voxel is set.
BBox bounding_box(const Mask& mask);

/// 2|A n B| / (|A| + |B|); 1 when both are empty.
double dice(const Mask& a, const Mask& b);

struct LungSegmentation {
  Mask mask;
  BBox bbox;
};

/// binarize -> components -> interior lungs -> close -> bbox.
LungSegmentation segment_lungs(const HuVolume& volume, int threshold_hu = kDefaultAirThresholdHu,
                               int close_radius = kDefaultCloseRadius,
                               Connectivity connectivity = Connectivity::Six);

}  // namespace lungprep
