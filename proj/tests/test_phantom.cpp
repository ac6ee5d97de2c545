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

#include <filesystem>

#include "lungprep/dicom.hpp"
#include "lungprep/error.hpp"
#include "lungprep/lvol.hpp"
#include "lungprep/phantom.hpp"

using namespace lungprep;
namespace fs = std::filesystem;

namespace {

Index3 voxel_of(const Vec3& mm, const Spacing& s) {
  return {std::llround(mm[0] / s.dz), std::llround(mm[1] / s.dy), std::llround(mm[2] / s.dx)};
}

}  // namespace

TEST_CASE("noiseless phantom has exact tissue values") {
  PhantomSpec spec = PhantomSpec::thorax({40, 40, 40}, {5, 5, 5});
  spec.noise_sigma_hu = 0;
  const auto r = render_phantom(spec);
  for (const auto& lung : spec.lungs) {
    const Index3 c = voxel_of(lung.center_mm, spec.spacing);
    CHECK(r.volume.at(c.z, c.y, c.x) == -850);
  }
  CHECK(r.volume.at(0, 0, 0) == -1000);
  CHECK(r.volume.at(20, 20, 20) == 40);
  CHECK(r.truth.label == 0);
  CHECK(r.truth.lung_mask.popcount() > 0);
}

TEST_CASE("nodule sets the label and the HU") {
  PhantomSpec spec = PhantomSpec::thorax({40, 40, 40}, {5, 5, 5});
  spec.noise_sigma_hu = 0;
  spec.nodules.push_back({spec.lungs[1].center_mm, 10.0, 60});
  const auto r = render_phantom(spec);
  CHECK(r.truth.label == 1);
  const Index3 c = voxel_of(spec.lungs[1].center_mm, spec.spacing);
  CHECK(r.volume.at(c.z, c.y, c.x) == 60);
  CHECK(r.truth.features[2] > -200.0);
  spec.nodules.clear();
  CHECK(render_phantom(spec).truth.features[2] == doctest::Approx(-850.0));
}

TEST_CASE("invalid specs are rejected") {
  auto expect_invalid = [](const PhantomSpec& s) {
    try {
      validate_spec(s);
      FAIL("expected InvalidSpec");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidSpec);
    }
  };
  PhantomSpec spec = PhantomSpec::thorax({32, 32, 32}, {5, 5, 5});
  PhantomSpec s = spec;
  s.lungs[0].semi_axes_mm[2] *= 3;
  expect_invalid(s);
  s = spec;
  s.nodules.push_back({s.body.center_mm, 5.0, 0});  // mediastinum, outside both lungs
  expect_invalid(s);
  s = spec;
  s.nodules.push_back({s.lungs[0].center_mm, -1.0, 0});
  expect_invalid(s);
  s = spec;
  s.noise_sigma_hu = -1;
  expect_invalid(s);
}

TEST_CASE("generated files are deterministic and round-trip through ingest") {
  const fs::path root = fs::temp_directory_path() / "lungprep_phantom_test";
  fs::remove_all(root);
  PhantomSpec spec = PhantomSpec::thorax({12, 24, 20}, {5, 4, 4});
  spec.seed = 77;
  generate_phantom(spec, root / "a");
  generate_phantom(spec, root / "b");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    CHECK(read_file_bytes(e.path()) == read_file_bytes(root / "b" / e.path().filename()));
    ++files;
  }
  CHECK(files == 12);

  spec.noise_sigma_hu = 0;
  generate_phantom(spec, root / "c");
  const auto series = load_series_directory(root / "c");
  CHECK(series.volume == render_phantom(spec).volume);
  fs::remove_all(root);
}

TEST_CASE("cohort planning") {
  CohortOptions opt;
  opt.cases = 100;
  opt.dims = {24, 24, 24};
  opt.spacing = {10, 10, 10};
  const auto plan = plan_cohort(opt);
  std::size_t pos = 0;
  for (const auto& c : plan) {
    pos += c.label;
    CHECK(c.label == (c.spec.nodules.empty() ? 0 : 1));
  }
  CHECK(pos == 34);
  CHECK(plan[7].case_id == "case_0007");

  const auto again = plan_cohort(opt);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    CHECK(again[i].label == plan[i].label);
    CHECK(again[i].spec.seed == plan[i].spec.seed);
  }

  opt.positive_frac = 0;
  for (const auto& c : plan_cohort(opt)) CHECK(c.label == 0);
  opt.positive_frac = 1;
  for (const auto& c : plan_cohort(opt)) CHECK(c.label == 1);
}

TEST_CASE("cohort output is thread-count invariant") {
  const fs::path root = fs::temp_directory_path() / "lungprep_cohort_test";
  fs::remove_all(root);
  CohortOptions opt;
  opt.cases = 4;
  opt.dims = {16, 32, 32};
  opt.spacing = {5, 5, 5};
  opt.seed = 3;
  generate_cohort(opt, root / "t1");
  opt.threads = 3;
  generate_cohort(opt, root / "t3");
  CHECK(read_file_bytes(root / "t1" / "manifest.csv") == read_file_bytes(root / "t3" / "manifest.csv"));
  CHECK(read_file_bytes(root / "t1" / "features.csv") == read_file_bytes(root / "t3" / "features.csv"));
  CHECK(read_file_bytes(root / "t1" / "case_0002" / "slice_0005.dcm") ==
        read_file_bytes(root / "t3" / "case_0002" / "slice_0005.dcm"));
  fs::remove_all(root);
}
