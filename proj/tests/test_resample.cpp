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

#include <algorithm>
#include <random>

#include "lungprep/error.hpp"
#include "lungprep/resample.hpp"
#include "oracles.hpp"

using namespace lungprep;

namespace {

HuVolume random_volume(std::mt19937_64& gen, Dims d, Spacing s) {
  std::uniform_int_distribution<int> hu(kMinHu, kMaxHu);
  HuVolume v(d, s);
  for (auto& x : v.voxels) x = static_cast<std::int16_t>(hu(gen));
  return v;
}

}  // namespace

TEST_CASE("equal spacing is the identity") {
  std::mt19937_64 gen(1);
  const HuVolume v = random_volume(gen, {5, 6, 7}, {1.5, 0.7, 0.7});
  CHECK(trilinear_resample(v, v.spacing) == v);
}

TEST_CASE("constant volume stays constant") {
  const HuVolume v({9, 7, 5}, {2.5, 0.8, 0.9}, std::int16_t{-850});
  for (double t : {0.5, 1.0, 1.5, 3.7}) {
    const HuVolume out = trilinear_resample(v, {t, t, t});
    CHECK(std::all_of(out.voxels.begin(), out.voxels.end(), [](std::int16_t x) { return x == -850; }));
  }
}

TEST_CASE("extent formula") {
  const HuVolume v({100, 2, 2}, {3.0, 1.5, 1.5});
  CHECK(trilinear_resample(v, {1.5, 1.5, 1.5}).dims == Dims{200, 2, 2});
  CHECK(resampled_extent(3, 0.1, 10.0) == 1);
  CHECK(resampled_extent(10, 1.0, 0.4) == 25);
}

TEST_CASE("linear ramp at half spacing matches the scalar oracle") {
  HuVolume v({8, 8, 8}, {2.0, 2.0, 2.0});
  for (std::size_t z = 0; z < 8; ++z)
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x) v.at(z, y, x) = static_cast<std::int16_t>(-1000 + 37 * z + 11 * y + 5 * x);
  const HuVolume out = trilinear_resample(v, {1.0, 1.0, 1.0});
  REQUIRE(out.dims == Dims{16, 16, 16});
  for (std::size_t z = 0; z < 16; ++z)
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x) {
        const double expect = oracle::trilinear_at(v, double(z), double(y), double(x));
        CHECK(std::abs(out.at(z, y, x) - expect) <= 1.0);
      }
  // Interior ramp points are exact: (z, y, x) = (3, 5, 7) in output is
  // (1.5, 2.5, 3.5) in input index space.
  CHECK(out.at(3, 5, 7) == static_cast<std::int16_t>(std::lround(-1000 + 37 * 1.5 + 11 * 2.5 + 5 * 3.5)));
}

TEST_CASE("random volumes match the oracle within rounding") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<std::size_t> extent(1, 7);
  std::uniform_real_distribution<double> spacing(0.4, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const HuVolume v = random_volume(gen, {extent(gen), extent(gen), extent(gen)},
                                     {spacing(gen), spacing(gen), spacing(gen)});
    const Spacing target{spacing(gen), spacing(gen), spacing(gen)};
    const HuVolume out = trilinear_resample(v, target);
    const auto [lo, hi] = std::minmax_element(v.voxels.begin(), v.voxels.end());
    for (std::size_t z = 0; z < out.dims.depth; ++z)
      for (std::size_t y = 0; y < out.dims.height; ++y)
        for (std::size_t x = 0; x < out.dims.width; ++x) {
          const double expect = oracle::trilinear_at(v, z * target.dz, y * target.dy, x * target.dx);
          CHECK(std::abs(out.at(z, y, x) - expect) <= 0.5 + 1e-6);
          CHECK(out.at(z, y, x) >= *lo);
          CHECK(out.at(z, y, x) <= *hi);
        }
  }
}

TEST_CASE("idempotent at equal spacing") {
  std::mt19937_64 gen(5);
  const HuVolume v = random_volume(gen, {6, 5, 4}, {2.5, 0.7, 0.7});
  const HuVolume once = trilinear_resample(v, {1.5, 1.5, 1.5});
  CHECK(trilinear_resample(once, {1.5, 1.5, 1.5}) == once);
}

TEST_CASE("non-positive target spacing is rejected") {
  const HuVolume v({2, 2, 2}, {1, 1, 1});
  try {
    trilinear_resample(v, {0.0, 1.0, 1.0});
    FAIL("expected InvalidSpacing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpacing);
  }
}
