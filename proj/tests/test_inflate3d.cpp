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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "lungprep/error.hpp"
#include "lungprep/inflate3d.hpp"
#include "lungprep/lvol.hpp"
#include "oracles.hpp"

using namespace lungprep;

namespace {

template <typename T>
void fill(std::vector<T>& v, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& x : v) x = static_cast<T>(d(gen));
}

template <typename T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

template <typename T>
Kernel2D<T> random_kernel2d(std::mt19937_64& gen, std::size_t kh, std::size_t kw, std::size_t ci, std::size_t co) {
  Kernel2D<T> k(kh, kw, ci, co);
  fill(k.weights, gen);
  fill(k.bias, gen);
  return k;
}

}  // namespace

TEST_CASE("inflate_kernel slices") {
  std::mt19937_64 gen(1);
  const auto k = random_kernel2d<double>(gen, 3, 3, 2, 4);
  const auto one = inflate_kernel(k, 1);
  CHECK(one.kt == 1);
  CHECK(one.weights == k.weights);
  CHECK(one.bias == k.bias);

  const auto five = inflate_kernel(k, 5);
  REQUIRE(five.weights.size() == 5 * k.weights.size());
  CHECK(five.bias == k.bias);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t o = 0; o < 4; ++o) CHECK(five.at(t, y, x, i, o) == doctest::Approx(k.at(y, x, i, o) / 5.0).epsilon(1e-15));
  for (std::size_t j = 0; j < k.weights.size(); ++j) {
    double s = 0;
    for (std::size_t t = 0; t < 5; ++t) s += five.weights[t * k.weights.size() + j];
    CHECK(std::abs(s - k.weights[j]) <= 1e-15);
  }
}

TEST_CASE("boring_volume repeats frames") {
  std::mt19937_64 gen(2);
  Tensor3<float> img(3, 4, 5);
  fill(img.data, gen);
  const auto one = boring_volume(img, 1);
  CHECK(one.data == img.data);
  const auto v = boring_volume(img, 4);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 5; ++x) CHECK(v.at(c, t, y, x) == img.at(c, y, x));
}

TEST_CASE("conv2d analytic cases") {
  Tensor3<double> img(1, 4, 4);
  for (std::size_t i = 0; i < 16; ++i) img.data[i] = double(i);
  Kernel2D<double> id(1, 1, 1, 1);
  id.weights[0] = 1;
  CHECK(conv2d(img, id).data == img.data);

  const double c = 1.75;
  Tensor3<double> flat(3, 6, 5, c);
  Kernel2D<double> ones(3, 3, 3, 2);
  std::fill(ones.weights.begin(), ones.weights.end(), 1.0);
  const auto out = conv2d(flat, ones);
  CHECK(out.height == 4);
  CHECK(out.width == 3);
  for (double v : out.data) CHECK(v == doctest::Approx(9 * c * 3));

  const auto same = conv2d(flat, ones, {}, Padding::Same);
  CHECK(same.height == 6);
  CHECK(same.width == 5);
  CHECK(same.at(0, 0, 0) == doctest::Approx(4 * c * 3));  // corner sees 2x2 of the image

  try {
    conv2d(Tensor3<double>(1, 2, 2), ones);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
  try {
    conv2d(Tensor3<double>(2, 5, 5), ones);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("conv3d identity kernel") {
  std::mt19937_64 gen(3);
  Tensor4<double> v(2, 3, 4, 5);
  fill(v.data, gen);
  Kernel3D<double> id(1, 1, 1, 2, 2);
  id.at(0, 0, 0, 0, 0) = 1;
  id.at(0, 0, 0, 1, 1) = 1;
  CHECK(conv3d(v, id).data == v.data);
}

TEST_CASE("conv2d, conv3d and maxpool3d agree with brute-force oracles") {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<std::size_t> small(1, 4), stride(1, 3), extent(1, 8);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t kh = small(gen), kw = small(gen), ci = small(gen), co = small(gen);
    const bool same = coin(gen);
    Tensor3<double> img(ci, kh + extent(gen) - 1, kw + extent(gen) - 1);
    fill(img.data, gen);
    const auto k = random_kernel2d<double>(gen, kh, kw, ci, co);
    const std::size_t sh = stride(gen), sw = stride(gen);
    const auto got = conv2d(img, k, {sh, sw}, same ? Padding::Same : Padding::Valid);
    const auto want = oracle::conv2d(img, k, sh, sw, same);
    REQUIRE(got.height == want.height);
    REQUIRE(got.width == want.width);
    CHECK(max_abs_diff(got.data, want.data) <= 1e-12);
  }
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t kt = small(gen), kh = small(gen), kw = small(gen), ci = small(gen), co = small(gen);
    Tensor4<double> v(ci, kt + extent(gen) - 1, kh + extent(gen) - 1, kw + extent(gen) - 1);
    fill(v.data, gen);
    Kernel3D<double> k(kt, kh, kw, ci, co);
    fill(k.weights, gen);
    fill(k.bias, gen);
    const bool st = coin(gen), sh = coin(gen), sw = coin(gen);
    const Stride3 s{stride(gen), stride(gen), stride(gen)};
    const auto pad = [](bool b) { return b ? Padding::Same : Padding::Valid; };
    const auto got = conv3d(v, k, s, {pad(st), pad(sh), pad(sw)});
    const auto want = oracle::conv3d(v, k, s.t, s.h, s.w, st, sh, sw);
    REQUIRE(got.depth == want.depth);
    REQUIRE(got.height == want.height);
    REQUIRE(got.width == want.width);
    CHECK(max_abs_diff(got.data, want.data) <= 1e-12);
  }
  for (int trial = 0; trial < 300; ++trial) {
    const Window3 w{small(gen), small(gen), small(gen)};
    Tensor4<double> v(small(gen), w.t + extent(gen) - 1, w.h + extent(gen) - 1, w.w + extent(gen) - 1);
    fill(v.data, gen);
    const Stride3 s{stride(gen), stride(gen), stride(gen)};
    const auto got = maxpool3d(v, w, s);
    const auto want = oracle::maxpool3d(v, w.t, w.h, w.w, s.t, s.h, s.w);
    REQUIRE(got.data.size() == want.data.size());
    CHECK(got.data == want.data);
  }
}

TEST_CASE("inflation equivalence on boring volumes") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> ksz(1, 7), ch(1, 8), depth(1, 7), extra(0, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t kh = ksz(gen), kw = ksz(gen), ci = ch(gen), co = ch(gen), n = depth(gen);
    Tensor3<double> img(ci, kh + extra(gen), kw + extra(gen));
    fill(img.data, gen);
    const auto k = random_kernel2d<double>(gen, kh, kw, ci, co);
    const auto frame = conv2d(img, k);
    const auto vol = conv3d(boring_volume(img, n), inflate_kernel(k, n));
    REQUIRE(vol.depth == 1);
    CHECK(max_abs_diff(vol.data, frame.data) <= 1e-10);

    Tensor3<float> imgf(ci, img.height, img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i) imgf.data[i] = static_cast<float>(img.data[i]);
    Kernel2D<float> kf(kh, kw, ci, co);
    for (std::size_t i = 0; i < k.weights.size(); ++i) kf.weights[i] = static_cast<float>(k.weights[i]);
    for (std::size_t i = 0; i < co; ++i) kf.bias[i] = static_cast<float>(k.bias[i]);
    CHECK(max_abs_diff(conv3d(boring_volume(imgf, n), inflate_kernel(kf, n)).data, conv2d(imgf, kf).data) <= 1e-5);
  }
}

TEST_CASE("convolution is linear for bias-free kernels") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor4<double> x(2, 4, 5, 5), y(2, 4, 5, 5);
    fill(x.data, gen);
    fill(y.data, gen);
    Kernel3D<double> k(2, 3, 2, 2, 3);
    fill(k.weights, gen);
    const double a = 1.7, b = -0.4;
    Tensor4<double> mix = x;
    for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * x.data[i] + b * y.data[i];
    const auto cx = conv3d(x, k), cy = conv3d(y, k), cm = conv3d(mix, k, {}, {Padding::Same, Padding::Same, Padding::Valid});
    const auto cxs = conv3d(x, k, {}, {Padding::Same, Padding::Same, Padding::Valid});
    const auto cys = conv3d(y, k, {}, {Padding::Same, Padding::Same, Padding::Valid});
    for (std::size_t i = 0; i < cm.data.size(); ++i) CHECK(std::abs(cm.data[i] - (a * cxs.data[i] + b * cys.data[i])) <= 1e-12);
    CHECK(cx.data.size() == cy.data.size());
  }
}

TEST_CASE("maxpool identity and depth-spanning window") {
  std::mt19937_64 gen(7);
  Tensor4<float> v(2, 3, 4, 4);
  fill(v.data, gen);
  CHECK(maxpool3d(v, {1, 1, 1}, {1, 1, 1}).data == v.data);

  Tensor3<float> img(2, 6, 6);
  fill(img.data, gen);
  const auto pooled = maxpool3d(boring_volume(img, 5), {5, 2, 3}, {1, 2, 3});
  CHECK(pooled.depth == 1);
  CHECK(pooled.data == maxpool2d(img, {2, 3}, {2, 3}).data);
  try {
    maxpool3d(v, {4, 1, 1}, {1, 1, 1});
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("LVW round trip and rejection") {
  std::mt19937_64 gen(8);
  Kernel2D<float> k(3, 2, 4, 5);
  fill(k.weights, gen);
  fill(k.bias, gen);
  const auto bytes = encode_lvw(k);
  CHECK(bytes.size() == 4 + 4 + 16 + 4 * (k.weights.size() + 5));
  const auto back = std::get<Kernel2D<float>>(decode_lvw(bytes));
  CHECK(back.weights == k.weights);
  CHECK(back.bias == k.bias);
  CHECK(encode_lvw(back) == bytes);

  const auto k3 = inflate_kernel(k, 3);
  const auto path = std::filesystem::temp_directory_path() / "lungprep_test_kernel.lvw";
  write_lvw(path, k3);
  const auto r3 = std::get<Kernel3D<float>>(read_lvw(path));
  CHECK(encode_lvw(r3) == encode_lvw(k3));
  std::filesystem::remove(path);

  auto expect_code = [](std::vector<std::uint8_t> b, ErrorCode code) {
    try {
      decode_lvw(b);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  auto bad = bytes;
  bad[0] = 'X';
  expect_code(bad, ErrorCode::BadMagic);
  bad = bytes;
  bad[4] = 3;
  expect_code(bad, ErrorCode::UnsupportedVersion);
  expect_code(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1), ErrorCode::TruncatedPayload);
}
