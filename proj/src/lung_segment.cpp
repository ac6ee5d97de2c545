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

#include "lungprep/lung_segment.hpp"

#include <algorithm>
#include <numeric>

#include "lungprep/error.hpp"

namespace lungprep {
namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

// Neighbours already visited in a z-y-x raster scan.
std::vector<Index3> backward_neighbours(Connectivity c) {
  std::vector<Index3> out;
  for (int dz = -1; dz <= 0; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const bool before = dz < 0 || (dz == 0 && (dy < 0 || (dy == 0 && dx < 0)));
        if (!before) continue;
        const int manhattan = std::abs(dz) + std::abs(dy) + std::abs(dx);
        if (c == Connectivity::Six && manhattan != 1) continue;
        out.push_back({dz, dy, dx});
      }
    }
  }
  return out;
}

}  // namespace

Mask binarize_air(const HuVolume& volume, int threshold_hu) {
  Mask m(volume.dims, volume.spacing);
  for (std::size_t i = 0; i < volume.voxels.size(); ++i) m.voxels[i] = volume.voxels[i] < threshold_hu;
  return m;
}

LabelMap connected_components(const Mask& mask, Connectivity connectivity) {
  const Dims d = mask.dims;
  LabelMap out{d, std::vector<std::uint32_t>(d.count(), 0), 0};
  const auto neighbours = backward_neighbours(connectivity);

  // Pass 1: provisional labels (1-based; 0 stays background).
  DisjointSet sets;
  sets.make();  // slot 0 unused
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.depth; ++z) {
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x, ++i) {
        if (!mask.voxels[i]) continue;
        std::uint32_t label = 0;
        for (const auto& n : neighbours) {
          const std::int64_t nz = static_cast<std::int64_t>(z) + n.z;
          const std::int64_t ny = static_cast<std::int64_t>(y) + n.y;
          const std::int64_t nx = static_cast<std::int64_t>(x) + n.x;
          if (nz < 0 || ny < 0 || nx < 0 || ny >= static_cast<std::int64_t>(d.height) ||
              nx >= static_cast<std::int64_t>(d.width)) {
            continue;
          }
          const std::uint32_t nl = out.labels[mask.offset(nz, ny, nx)];
          if (nl == 0) continue;
          if (label == 0) {
            label = nl;
          } else {
            sets.unite(label, nl);
          }
        }
        out.labels[i] = label != 0 ? label : sets.make();
      }
    }
  }

  // Pass 2: resolve roots, numbering components by first encounter.
  std::vector<std::uint32_t> final_label;
  for (auto& l : out.labels) {
    if (l == 0) continue;
    const std::uint32_t root = sets.find(l);
    if (root >= final_label.size()) final_label.resize(root + 1, 0);
    if (final_label[root] == 0) final_label[root] = ++out.component_count;
    l = final_label[root];
  }
  return out;
}

Mask extract_lung_mask(const LabelMap& labels, const Spacing& spacing) {
  const Dims d = labels.dims;
  std::vector<std::size_t> size(labels.component_count + 1, 0);
  std::vector<bool> touches_border(labels.component_count + 1, false);
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.depth; ++z) {
    const bool zb = z == 0 || z + 1 == d.depth;
    for (std::size_t y = 0; y < d.height; ++y) {
      const bool yb = zb || y == 0 || y + 1 == d.height;
      for (std::size_t x = 0; x < d.width; ++x, ++i) {
        const std::uint32_t l = labels.labels[i];
        if (l == 0) continue;
        ++size[l];
        if (yb || x == 0 || x + 1 == d.width) touches_border[l] = true;
      }
    }
  }

  std::vector<std::uint32_t> interior;
  for (std::uint32_t l = 1; l <= labels.component_count; ++l) {
    if (!touches_border[l]) interior.push_back(l);
  }
  if (interior.empty()) {
    throw Error(ErrorCode::SegmentationEmpty, "every air component touches the volume border");
  }
  std::stable_sort(interior.begin(), interior.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return size[a] > size[b]; });
  interior.resize(std::min<std::size_t>(interior.size(), 2));

  std::vector<bool> keep(labels.component_count + 1, false);
  for (auto l : interior) keep[l] = true;
  Mask out(d, spacing);
  for (std::size_t j = 0; j < out.voxels.size(); ++j) out.voxels[j] = keep[labels.labels[j]];
  return out;
}

std::vector<Index3> ball_offsets(int radius) {
  std::vector<Index3> out;
  for (int dz = -radius; dz <= radius; ++dz) {
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        if (dz * dz + dy * dy + dx * dx <= radius * radius) out.push_back({dz, dy, dx});
      }
    }
  }
  return out;
}

Mask dilate(const Mask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidConfig, "negative structuring radius");
  if (radius == 0) return mask;
  const auto ball = ball_offsets(radius);
  Mask out(mask.dims, mask.spacing);
  const Dims d = mask.dims;
  for (std::size_t z = 0; z < d.depth; ++z) {
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x) {
        if (!mask.at(z, y, x)) continue;
        for (const auto& o : ball) {
          const Index3 p{static_cast<std::int64_t>(z) + o.z, static_cast<std::int64_t>(y) + o.y,
                         static_cast<std::int64_t>(x) + o.x};
          if (mask.contains(p)) out.at(p.z, p.y, p.x) = 1;
        }
      }
    }
  }
  return out;
}

Mask erode(const Mask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidConfig, "negative structuring radius");
  if (radius == 0) return mask;
  const auto ball = ball_offsets(radius);
  Mask out(mask.dims, mask.spacing);
  const Dims d = mask.dims;
  for (std::size_t z = 0; z < d.depth; ++z) {
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x) {
        if (!mask.at(z, y, x)) continue;
        bool all = true;
        for (const auto& o : ball) {
          const Index3 p{static_cast<std::int64_t>(z) + o.z, static_cast<std::int64_t>(y) + o.y,
                         static_cast<std::int64_t>(x) + o.x};
          if (!mask.contains(p) || !mask.at(p.z, p.y, p.x)) {
            all = false;
            break;
          }
        }
        out.at(z, y, x) = all;
      }
    }
  }
  return out;
}

Mask morphological_close(const Mask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidConfig, "negative closing radius");
  return erode(dilate(mask, radius), radius);
}

BBox bounding_box(const Mask& mask) {
  const Dims d = mask.dims;
  BBox b{{INT64_MAX, INT64_MAX, INT64_MAX}, {-1, -1, -1}, {}};
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.depth; ++z) {
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x, ++i) {
        if (!mask.voxels[i]) continue;
        const auto zi = static_cast<std::int64_t>(z), yi = static_cast<std::int64_t>(y),
                   xi = static_cast<std::int64_t>(x);
        b.min = {std::min(b.min.z, zi), std::min(b.min.y, yi), std::min(b.min.x, xi)};
        b.max = {std::max(b.max.z, zi), std::max(b.max.y, yi), std::max(b.max.x, xi)};
      }
    }
  }
  if (b.max.z < 0) throw Error(ErrorCode::EmptyMask, "bounding box of an empty mask");
  // Bounds are non-negative, so integer division is the floor.
  b.center = {(b.min.z + b.max.z) / 2, (b.min.y + b.max.y) / 2, (b.min.x + b.max.x) / 2};
  return b;
}

double dice(const Mask& a, const Mask& b) {
  if (a.dims != b.dims) throw Error(ErrorCode::ShapeMismatch, "dice of masks with different dims");
  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.voxels.size(); ++i) {
    const bool x = a.voxels[i] != 0, y = b.voxels[i] != 0;
    inter += x && y;
    na += x;
    nb += y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

LungSegmentation segment_lungs(const HuVolume& volume, int threshold_hu, int close_radius,
                               Connectivity connectivity) {
  const Mask air = binarize_air(volume, threshold_hu);
  const LabelMap labels = connected_components(air, connectivity);
  Mask lungs = morphological_close(extract_lung_mask(labels, volume.spacing), close_radius);
  BBox box = bounding_box(lungs);
  return {std::move(lungs), box};
}

}  // namespace lungprep
