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

// 2D -> 3D filter inflation and the small dense convolution engine used to
// check it.
//
// Inflating a kh x kw filter to depth N repeats it N times along a new
// leading axis and divides by N. On an input that is constant along depth,
// a valid-depth 3D convolution with the inflated filter then reproduces the
// 2D convolution of a single frame. That identity is what makes 2D
// pretrained weights a sensible initialization for a volumetric network.
//
// Layouts: images are (channel, height, width), volumes are
// (channel, depth, height, width), 2D kernels are (kh, kw, cin, cout) and 3D
// kernels are (kt, kh, kw, cin, cout), all row-major.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "lungprep/error.hpp"

namespace lungprep {

template <typename T>
struct Tensor3 {
  std::size_t channels = 0, height = 0, width = 0;
  std::vector<T> data;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t h, std::size_t w, T fill = T{})
      : channels(c), height(h), width(w), data(c * h * w, fill) {}

  T& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  const T& at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
};

template <typename T>
struct Tensor4 {
  std::size_t channels = 0, depth = 0, height = 0, width = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(std::size_t c, std::size_t d, std::size_t h, std::size_t w, T fill = T{})
      : channels(c), depth(d), height(h), width(w), data(c * d * h * w, fill) {}

  std::size_t offset(std::size_t c, std::size_t t, std::size_t y, std::size_t x) const {
    return ((c * depth + t) * height + y) * width + x;
  }
  T& at(std::size_t c, std::size_t t, std::size_t y, std::size_t x) { return data[offset(c, t, y, x)]; }
  const T& at(std::size_t c, std::size_t t, std::size_t y, std::size_t x) const { return data[offset(c, t, y, x)]; }
};

template <typename T>
struct Kernel2D {
  std::size_t kh = 1, kw = 1, cin = 1, cout = 1;
  std::vector<T> weights;  // kh * kw * cin * cout
  std::vector<T> bias;     // cout

  Kernel2D() = default;
  Kernel2D(std::size_t h, std::size_t w, std::size_t ci, std::size_t co)
      : kh(h), kw(w), cin(ci), cout(co), weights(h * w * ci * co, T{}), bias(co, T{}) {}

  T& at(std::size_t y, std::size_t x, std::size_t i, std::size_t o) { return weights[((y * kw + x) * cin + i) * cout + o]; }
  const T& at(std::size_t y, std::size_t x, std::size_t i, std::size_t o) const {
    return weights[((y * kw + x) * cin + i) * cout + o];
  }
};

template <typename T>
struct Kernel3D {
  std::size_t kt = 1, kh = 1, kw = 1, cin = 1, cout = 1;
  std::vector<T> weights;  // kt * kh * kw * cin * cout
  std::vector<T> bias;     // cout

  Kernel3D() = default;
  Kernel3D(std::size_t t, std::size_t h, std::size_t w, std::size_t ci, std::size_t co)
      : kt(t), kh(h), kw(w), cin(ci), cout(co), weights(t * h * w * ci * co, T{}), bias(co, T{}) {}

  std::size_t slice_size() const { return kh * kw * cin * cout; }
  T& at(std::size_t t, std::size_t y, std::size_t x, std::size_t i, std::size_t o) {
    return weights[t * slice_size() + ((y * kw + x) * cin + i) * cout + o];
  }
  const T& at(std::size_t t, std::size_t y, std::size_t x, std::size_t i, std::size_t o) const {
    return weights[t * slice_size() + ((y * kw + x) * cin + i) * cout + o];
  }
};

enum class Padding { Valid, Same };

struct Stride2 {
  std::size_t h = 1, w = 1;
};
struct Stride3 {
  std::size_t t = 1, h = 1, w = 1;
};
struct Padding3 {
  Padding t = Padding::Valid, h = Padding::Valid, w = Padding::Valid;
};
struct Window3 {
  std::size_t t = 1, h = 1, w = 1;
};

namespace detail {

// Output length and leading pad along one axis. Same padding splits the
// total pad with the extra voxel on the high side.
struct AxisPlan {
  std::size_t out = 0;
  std::int64_t pad_lo = 0;
};

inline AxisPlan plan_axis(std::size_t in, std::size_t k, std::size_t stride, Padding p) {
  if (k == 0 || stride == 0) throw Error(ErrorCode::ShapeMismatch, "kernel extent and stride must be >= 1");
  if (p == Padding::Valid) {
    if (in < k) throw Error(ErrorCode::ShapeMismatch, "input smaller than kernel under valid padding");
    return {(in - k) / stride + 1, 0};
  }
  const std::size_t out = (in + stride - 1) / stride;
  const std::int64_t needed = static_cast<std::int64_t>((out - 1) * stride + k) - static_cast<std::int64_t>(in);
  const std::int64_t total = std::max<std::int64_t>(needed, 0);
  return {out, total / 2};
}

// Compensated (Kahan) running sums over an output buffer. Keeps f32
// accumulation within about one ulp of the exact sum.
template <typename T>
class CompensatedSum {
 public:
  explicit CompensatedSum(std::vector<T>& sums) : sums_(sums), comp_(sums.size(), T{}) {}

  void add(std::size_t idx, T value) {
    const T y = value - comp_[idx];
    const T t = sums_[idx] + y;
    comp_[idx] = (t - sums_[idx]) - y;
    sums_[idx] = t;
  }

 private:
  std::vector<T>& sums_;
  std::vector<T> comp_;
};

}  // namespace detail

/// Every depth slice is k / N; bias is copied.
template <typename T>
Kernel3D<T> inflate_kernel(const Kernel2D<T>& k, std::size_t depth) {
  if (depth == 0) throw Error(ErrorCode::ShapeMismatch, "inflation depth must be >= 1");
  Kernel3D<T> out(depth, k.kh, k.kw, k.cin, k.cout);
  const T scale = static_cast<T>(depth);
  for (std::size_t t = 0; t < depth; ++t) {
    std::transform(k.weights.begin(), k.weights.end(), out.weights.begin() + t * out.slice_size(),
                   [scale](T w) { return w / scale; });
  }
  out.bias = k.bias;
  return out;
}

/// Repeats the image N times along a new depth axis.
template <typename T>
Tensor4<T> boring_volume(const Tensor3<T>& img, std::size_t depth) {
  if (depth == 0) throw Error(ErrorCode::ShapeMismatch, "boring volume depth must be >= 1");
  Tensor4<T> out(img.channels, depth, img.height, img.width);
  const std::size_t plane = img.height * img.width;
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t t = 0; t < depth; ++t) {
      std::copy_n(img.data.begin() + c * plane, plane, out.data.begin() + out.offset(c, t, 0, 0));
    }
  }
  return out;
}

/// Cross-correlation plus bias.
template <typename T>
Tensor3<T> conv2d(const Tensor3<T>& img, const Kernel2D<T>& k, Stride2 stride = {}, Padding padding = Padding::Valid) {
  if (img.channels != k.cin) throw Error(ErrorCode::ShapeMismatch, "input channels do not match kernel cin");
  const auto py = detail::plan_axis(img.height, k.kh, stride.h, padding);
  const auto px = detail::plan_axis(img.width, k.kw, stride.w, padding);
  Tensor3<T> out(k.cout, py.out, px.out);
  for (std::size_t o = 0; o < k.cout; ++o) {
    std::fill_n(out.data.begin() + o * py.out * px.out, py.out * px.out, k.bias.empty() ? T{} : k.bias[o]);
  }
  detail::CompensatedSum<T> acc(out.data);
  // Scatter each kernel tap over the whole output plane.
  for (std::size_t i = 0; i < k.cin; ++i) {
    for (std::size_t ky = 0; ky < k.kh; ++ky) {
      for (std::size_t kx = 0; kx < k.kw; ++kx) {
        for (std::size_t oy = 0; oy < py.out; ++oy) {
          const std::int64_t iy = static_cast<std::int64_t>(oy * stride.h + ky) - py.pad_lo;
          if (iy < 0 || iy >= static_cast<std::int64_t>(img.height)) continue;
          for (std::size_t ox = 0; ox < px.out; ++ox) {
            const std::int64_t ix = static_cast<std::int64_t>(ox * stride.w + kx) - px.pad_lo;
            if (ix < 0 || ix >= static_cast<std::int64_t>(img.width)) continue;
            const T v = img.at(i, iy, ix);
            for (std::size_t o = 0; o < k.cout; ++o) {
              acc.add((o * py.out + oy) * px.out + ox, v * k.at(ky, kx, i, o));
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> conv3d(const Tensor4<T>& vol, const Kernel3D<T>& k, Stride3 stride = {}, Padding3 padding = {}) {
  if (vol.channels != k.cin) throw Error(ErrorCode::ShapeMismatch, "input channels do not match kernel cin");
  const auto pt = detail::plan_axis(vol.depth, k.kt, stride.t, padding.t);
  const auto py = detail::plan_axis(vol.height, k.kh, stride.h, padding.h);
  const auto px = detail::plan_axis(vol.width, k.kw, stride.w, padding.w);
  Tensor4<T> out(k.cout, pt.out, py.out, px.out);
  const std::size_t frame = pt.out * py.out * px.out;
  for (std::size_t o = 0; o < k.cout; ++o) {
    std::fill_n(out.data.begin() + o * frame, frame, k.bias.empty() ? T{} : k.bias[o]);
  }
  detail::CompensatedSum<T> acc(out.data);
  for (std::size_t i = 0; i < k.cin; ++i) {
    for (std::size_t kt = 0; kt < k.kt; ++kt) {
      for (std::size_t ky = 0; ky < k.kh; ++ky) {
        for (std::size_t kx = 0; kx < k.kw; ++kx) {
          for (std::size_t ot = 0; ot < pt.out; ++ot) {
            const std::int64_t it = static_cast<std::int64_t>(ot * stride.t + kt) - pt.pad_lo;
            if (it < 0 || it >= static_cast<std::int64_t>(vol.depth)) continue;
            for (std::size_t oy = 0; oy < py.out; ++oy) {
              const std::int64_t iy = static_cast<std::int64_t>(oy * stride.h + ky) - py.pad_lo;
              if (iy < 0 || iy >= static_cast<std::int64_t>(vol.height)) continue;
              for (std::size_t ox = 0; ox < px.out; ++ox) {
                const std::int64_t ix = static_cast<std::int64_t>(ox * stride.w + kx) - px.pad_lo;
                if (ix < 0 || ix >= static_cast<std::int64_t>(vol.width)) continue;
                const T v = vol.at(i, it, iy, ix);
                for (std::size_t o = 0; o < k.cout; ++o) {
                  acc.add(out.offset(o, ot, oy, ox), v * k.at(kt, ky, kx, i, o));
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

/// Valid-padding max pooling over (t, h, w) windows, per channel.
template <typename T>
Tensor4<T> maxpool3d(const Tensor4<T>& vol, Window3 window, Stride3 stride) {
  const auto pt = detail::plan_axis(vol.depth, window.t, stride.t, Padding::Valid);
  const auto py = detail::plan_axis(vol.height, window.h, stride.h, Padding::Valid);
  const auto px = detail::plan_axis(vol.width, window.w, stride.w, Padding::Valid);
  Tensor4<T> out(vol.channels, pt.out, py.out, px.out, std::numeric_limits<T>::lowest());
  for (std::size_t c = 0; c < vol.channels; ++c) {
    for (std::size_t t = 0; t < vol.depth; ++t) {
      for (std::size_t y = 0; y < vol.height; ++y) {
        for (std::size_t x = 0; x < vol.width; ++x) {
          const T v = vol.at(c, t, y, x);
          // Every output window containing (t, y, x).
          const std::size_t ot_hi = std::min(t / stride.t, pt.out - 1);
          const std::size_t oy_hi = std::min(y / stride.h, py.out - 1);
          const std::size_t ox_hi = std::min(x / stride.w, px.out - 1);
          for (std::size_t ot = ot_hi + 1; ot-- > 0 && ot * stride.t + window.t > t;) {
            for (std::size_t oy = oy_hi + 1; oy-- > 0 && oy * stride.h + window.h > y;) {
              for (std::size_t ox = ox_hi + 1; ox-- > 0 && ox * stride.w + window.w > x;) {
                T& dst = out.at(c, ot, oy, ox);
                dst = std::max(dst, v);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

/// 2D max pooling; the reference leg for pooling inflation.
template <typename T>
Tensor3<T> maxpool2d(const Tensor3<T>& img, Stride2 window, Stride2 stride) {
  Tensor4<T> as_volume(img.channels, 1, img.height, img.width);
  as_volume.data = img.data;
  Tensor4<T> pooled = maxpool3d(as_volume, Window3{1, window.h, window.w}, Stride3{1, stride.h, stride.w});
  Tensor3<T> out(pooled.channels, pooled.height, pooled.width);
  out.data = std::move(pooled.data);
  return out;
}

// LVW weight files:
//   "LVW1", rank (u32), rank x u32 shape, f32 weights, then cout f32 biases
// where cout is the last shape entry. Rank 4 holds a 2D kernel, rank 5 a
// 3D kernel; all integers and floats little-endian.
using AnyKernel = std::variant<Kernel2D<float>, Kernel3D<float>>;

std::vector<std::uint8_t> encode_lvw(const Kernel2D<float>& k);
std::vector<std::uint8_t> encode_lvw(const Kernel3D<float>& k);
AnyKernel decode_lvw(std::span<const std::uint8_t> bytes);
void write_lvw(const std::filesystem::path& path, const AnyKernel& k);
AnyKernel read_lvw(const std::filesystem::path& path);

}  // namespace lungprep
