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

#include "lungprep/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lungprep/error.hpp"

namespace lungprep {
namespace {

// Per-axis sample table: lower index, upper index, weight of the upper one.
struct AxisTaps {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
  std::vector<double> frac;
};

AxisTaps make_taps(std::size_t n_in, double s_in, std::size_t n_out, double s_out) {
  AxisTaps t;
  t.lo.resize(n_out);
  t.hi.resize(n_out);
  t.frac.resize(n_out);
  const double last = static_cast<double>(n_in - 1);
  for (std::size_t i = 0; i < n_out; ++i) {
    double u = static_cast<double>(i) * s_out / s_in;
    u = std::clamp(u, 0.0, last);
    const double base = std::floor(u);
    t.lo[i] = static_cast<std::size_t>(base);
    t.hi[i] = std::min(t.lo[i] + 1, n_in - 1);
    t.frac[i] = u - base;
  }
  return t;
}

}  // namespace

std::size_t resampled_extent(std::size_t n, double in_spacing, double target_spacing) {
  const double r = std::round(static_cast<double>(n) * in_spacing / target_spacing);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

HuVolume trilinear_resample(const HuVolume& volume, const Spacing& target) {
  if (!(target.dz > 0.0) || !(target.dy > 0.0) || !(target.dx > 0.0)) {
    throw Error(ErrorCode::InvalidSpacing, "target spacing components must be positive");
  }
  const Dims& in = volume.dims;
  if (in.count() == 0) throw Error(ErrorCode::ShapeMismatch, "empty input volume");
  const Spacing& s = volume.spacing;
  const Dims out_dims{resampled_extent(in.depth, s.dz, target.dz), resampled_extent(in.height, s.dy, target.dy),
                      resampled_extent(in.width, s.dx, target.dx)};

  const AxisTaps tz = make_taps(in.depth, s.dz, out_dims.depth, target.dz);
  const AxisTaps ty = make_taps(in.height, s.dy, out_dims.height, target.dy);
  const AxisTaps tx = make_taps(in.width, s.dx, out_dims.width, target.dx);

  HuVolume out(out_dims, target);
  std::size_t o = 0;
  for (std::size_t z = 0; z < out_dims.depth; ++z) {
    const double fz = tz.frac[z];
    for (std::size_t y = 0; y < out_dims.height; ++y) {
      const double fy = ty.frac[y];
      const std::int16_t* r00 = &volume.at(tz.lo[z], ty.lo[y], 0);
      const std::int16_t* r01 = &volume.at(tz.lo[z], ty.hi[y], 0);
      const std::int16_t* r10 = &volume.at(tz.hi[z], ty.lo[y], 0);
      const std::int16_t* r11 = &volume.at(tz.hi[z], ty.hi[y], 0);
      for (std::size_t x = 0; x < out_dims.width; ++x, ++o) {
        const std::size_t xl = tx.lo[x];
        const std::size_t xh = tx.hi[x];
        const double fx = tx.frac[x];
        const double c00 = r00[xl] + fx * (r00[xh] - r00[xl]);
        const double c01 = r01[xl] + fx * (r01[xh] - r01[xl]);
        const double c10 = r10[xl] + fx * (r10[xh] - r10[xl]);
        const double c11 = r11[xl] + fx * (r11[xh] - r11[xl]);
        const double c0 = c00 + fy * (c01 - c00);
        const double c1 = c10 + fy * (c11 - c10);
        out.voxels[o] = to_hu(c0 + fz * (c1 - c0));
      }
    }
  }
  return out;
}

}  // namespace lungprep
