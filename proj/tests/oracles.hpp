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

// Brute-force reference implementations. These deliberately share no code
// with the library: they materialize padding, gather instead of scatter,
// flood-fill instead of union-find, and count pairs instead of ranks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "lungprep/inflate3d.hpp"
#include "lungprep/volume.hpp"

namespace oracle {

inline std::size_t out_len(std::size_t in, std::size_t k, std::size_t stride, bool same) {
  if (same) return (in + stride - 1) / stride;
  return (in - k) / stride + 1;
}

inline std::size_t pad_before(std::size_t in, std::size_t k, std::size_t stride, bool same) {
  if (!same) return 0;
  const std::size_t out = out_len(in, k, stride, true);
  const long long total = std::max<long long>(0, static_cast<long long>((out - 1) * stride + k) - static_cast<long long>(in));
  return static_cast<std::size_t>(total / 2);
}

template <typename T>
lungprep::Tensor3<T> conv2d(const lungprep::Tensor3<T>& img, const lungprep::Kernel2D<T>& k, std::size_t sh,
                            std::size_t sw, bool same) {
  const std::size_t oh = out_len(img.height, k.kh, sh, same), ow = out_len(img.width, k.kw, sw, same);
  const std::size_t ph = pad_before(img.height, k.kh, sh, same), pw = pad_before(img.width, k.kw, sw, same);
  // Zero-padded copy large enough for every window.
  const std::size_t H = (oh - 1) * sh + k.kh, W = (ow - 1) * sw + k.kw;
  std::vector<T> padded(img.channels * std::max(H, img.height + ph) * std::max(W, img.width + pw), T{});
  const std::size_t PH = std::max(H, img.height + ph), PW = std::max(W, img.width + pw);
  for (std::size_t c = 0; c < img.channels; ++c)
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x) padded[(c * PH + y + ph) * PW + x + pw] = img.at(c, y, x);

  lungprep::Tensor3<T> out(k.cout, oh, ow);
  for (std::size_t o = 0; o < k.cout; ++o)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        T acc = k.bias.empty() ? T{} : k.bias[o];
        for (std::size_t ky = 0; ky < k.kh; ++ky)
          for (std::size_t kx = 0; kx < k.kw; ++kx)
            for (std::size_t i = 0; i < k.cin; ++i)
              acc += padded[(i * PH + y * sh + ky) * PW + x * sw + kx] * k.at(ky, kx, i, o);
        out.at(o, y, x) = acc;
      }
  return out;
}

template <typename T>
lungprep::Tensor4<T> conv3d(const lungprep::Tensor4<T>& v, const lungprep::Kernel3D<T>& k, std::size_t st,
                            std::size_t sh, std::size_t sw, bool same_t, bool same_h, bool same_w) {
  const std::size_t od = out_len(v.depth, k.kt, st, same_t), oh = out_len(v.height, k.kh, sh, same_h),
                    ow = out_len(v.width, k.kw, sw, same_w);
  const long long pt = pad_before(v.depth, k.kt, st, same_t), ph = pad_before(v.height, k.kh, sh, same_h),
                  pw = pad_before(v.width, k.kw, sw, same_w);
  auto sample = [&](std::size_t c, long long t, long long y, long long x) -> T {
    if (t < 0 || y < 0 || x < 0 || t >= static_cast<long long>(v.depth) || y >= static_cast<long long>(v.height) ||
        x >= static_cast<long long>(v.width))
      return T{};
    return v.at(c, t, y, x);
  };
  lungprep::Tensor4<T> out(k.cout, od, oh, ow);
  for (std::size_t o = 0; o < k.cout; ++o)
    for (std::size_t t = 0; t < od; ++t)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
          T acc = k.bias.empty() ? T{} : k.bias[o];
          for (std::size_t kt = 0; kt < k.kt; ++kt)
            for (std::size_t ky = 0; ky < k.kh; ++ky)
              for (std::size_t kx = 0; kx < k.kw; ++kx)
                for (std::size_t i = 0; i < k.cin; ++i)
                  acc += sample(i, static_cast<long long>(t * st + kt) - pt, static_cast<long long>(y * sh + ky) - ph,
                                static_cast<long long>(x * sw + kx) - pw) *
                         k.at(kt, ky, kx, i, o);
          out.at(o, t, y, x) = acc;
        }
  return out;
}

template <typename T>
lungprep::Tensor4<T> maxpool3d(const lungprep::Tensor4<T>& v, std::size_t wt, std::size_t wh, std::size_t ww,
                               std::size_t st, std::size_t sh, std::size_t sw) {
  const std::size_t od = (v.depth - wt) / st + 1, oh = (v.height - wh) / sh + 1, ow = (v.width - ww) / sw + 1;
  lungprep::Tensor4<T> out(v.channels, od, oh, ow);
  for (std::size_t c = 0; c < v.channels; ++c)
    for (std::size_t t = 0; t < od; ++t)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
          T best = -std::numeric_limits<T>::infinity();
          for (std::size_t a = 0; a < wt; ++a)
            for (std::size_t b = 0; b < wh; ++b)
              for (std::size_t d = 0; d < ww; ++d) best = std::max(best, v.at(c, t * st + a, y * sh + b, x * sw + d));
          out.at(c, t, y, x) = best;
        }
  return out;
}

/// Trilinear value at a physical point, written as an explicit sum over the
/// eight surrounding voxels with tent weights.
inline double trilinear_at(const lungprep::HuVolume& v, double pz, double py, double px) {
  const double u[3] = {std::clamp(pz / v.spacing.dz, 0.0, double(v.dims.depth - 1)),
                       std::clamp(py / v.spacing.dy, 0.0, double(v.dims.height - 1)),
                       std::clamp(px / v.spacing.dx, 0.0, double(v.dims.width - 1))};
  const std::size_t n[3] = {v.dims.depth, v.dims.height, v.dims.width};
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    std::size_t idx[3];
    double w = 1.0;
    for (int a = 0; a < 3; ++a) {
      const bool upper = (corner >> a) & 1;
      const double base = std::floor(u[a]);
      std::size_t i = static_cast<std::size_t>(base) + (upper ? 1 : 0);
      if (i >= n[a]) i = n[a] - 1;
      const double frac = u[a] - base;
      w *= upper ? frac : 1.0 - frac;
      idx[a] = i;
    }
    acc += w * v.at(idx[0], idx[1], idx[2]);
  }
  return acc;
}

/// Breadth-first flood fill, components numbered in scan order.
inline std::vector<std::uint32_t> flood_fill(const lungprep::Mask& m, int connectivity, std::uint32_t& count) {
  const auto& d = m.dims;
  std::vector<std::uint32_t> labels(d.count(), 0);
  count = 0;
  for (std::size_t z = 0; z < d.depth; ++z)
    for (std::size_t y = 0; y < d.height; ++y)
      for (std::size_t x = 0; x < d.width; ++x) {
        if (!m.at(z, y, x) || labels[m.offset(z, y, x)]) continue;
        ++count;
        std::deque<lungprep::Index3> queue{{(long long)z, (long long)y, (long long)x}};
        labels[m.offset(z, y, x)] = count;
        while (!queue.empty()) {
          const auto p = queue.front();
          queue.pop_front();
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dz) + std::abs(dy) + std::abs(dx);
                if (manhattan == 0 || (connectivity == 6 && manhattan > 1)) continue;
                const lungprep::Index3 q{p.z + dz, p.y + dy, p.x + dx};
                if (!m.contains(q) || !m.at(q.z, q.y, q.x) || labels[m.offset(q.z, q.y, q.x)]) continue;
                labels[m.offset(q.z, q.y, q.x)] = count;
                queue.push_back(q);
              }
        }
      }
  return labels;
}

/// Dilation/erosion by scanning every voxel pair within the radius.
inline lungprep::Mask morph(const lungprep::Mask& m, int r, bool dilate) {
  lungprep::Mask out(m.dims, m.spacing);
  const auto& d = m.dims;
  for (long long z = 0; z < (long long)d.depth; ++z)
    for (long long y = 0; y < (long long)d.height; ++y)
      for (long long x = 0; x < (long long)d.width; ++x) {
        bool any = false, all = true;
        for (long long a = z - r; a <= z + r; ++a)
          for (long long b = y - r; b <= y + r; ++b)
            for (long long c = x - r; c <= x + r; ++c) {
              if ((a - z) * (a - z) + (b - y) * (b - y) + (c - x) * (c - x) > r * r) continue;
              const bool inside = m.contains({a, b, c});
              const bool set = inside && m.at(a, b, c);
              any = any || set;
              all = all && set;
            }
        out.at(z, y, x) = dilate ? any : all;
      }
  return out;
}

inline double auc_pairs(const std::vector<int>& labels, const std::vector<double>& scores) {
  double num = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[i] != 1 || labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) num += 1.0;
      else if (scores[i] == scores[j]) num += 0.5;
    }
  return num / static_cast<double>(pairs);
}

}  // namespace oracle
