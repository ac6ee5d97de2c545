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

// Synthetic thorax phantoms with exact ground truth.
//
// A phantom is an ellipsoidal soft-tissue body in air holding two
// ellipsoidal lungs; positive cases add spherical nodules inside a lung.
// Physical coordinates follow the volume convention: voxel (z, y, x) sits
// at (z * dz, y * dy, x * dx) mm.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lungprep/dicom.hpp"
#include "lungprep/lung_segment.hpp"
#include "lungprep/volume.hpp"

namespace lungprep {

inline constexpr int kBodyHu = 40;
inline constexpr int kLungHu = -850;
inline constexpr int kAirHu = -1000;
inline constexpr double kDefaultNoiseSigmaHu = 20.0;
inline constexpr double kDefaultPositiveFraction = 0.34;

using Vec3 = std::array<double, 3>;  // (z, y, x) mm

struct Ellipsoid {
  Vec3 center_mm{};
  Vec3 semi_axes_mm{1.0, 1.0, 1.0};

  /// Sum of squared normalized offsets; <= 1 inside.
  double level(const Vec3& p) const;
};

struct Nodule {
  Vec3 center_mm{};
  double radius_mm = 1.0;
  int hu = 0;
};

struct PhantomSpec {
  Dims dims{96, 96, 96};
  Spacing spacing{2.5, 2.5, 2.5};
  Ellipsoid body;
  std::array<Ellipsoid, 2> lungs;
  std::vector<Nodule> nodules;
  double noise_sigma_hu = kDefaultNoiseSigmaHu;
  std::uint64_t seed = 0;

  /// Centered thorax scaled to the grid's physical extent.
  static PhantomSpec thorax(Dims dims = {96, 96, 96}, Spacing spacing = {2.5, 2.5, 2.5});
};

/// (lung volume fraction, mean lung HU, max 3x3x3-mean HU inside the lungs)
using PhantomFeatures = std::array<double, 3>;
inline constexpr const char* kFeatureNames[] = {"lung_volume_fraction", "mean_lung_hu", "max_blob_hu"};

struct PhantomTruth {
  Mask lung_mask;
  BBox lung_bbox;
  int label = 0;
  PhantomFeatures features{};
};

struct RenderedPhantom {
  HuVolume volume;
  PhantomTruth truth;
};

/// Throws InvalidSpec when lungs leave the body, nodules leave their lung,
/// or any size is non-positive.
void validate_spec(const PhantomSpec& spec);

RenderedPhantom render_phantom(const PhantomSpec& spec);

/// Ground-truth lung mask rasterized on an arbitrary grid in the same
/// physical frame (e.g. the resampled grid).
Mask lung_mask_on_grid(const PhantomSpec& spec, const Dims& dims, const Spacing& spacing);

/// One DICOM slice per depth index: unsigned pixels, slope 1, intercept -1024.
std::vector<DicomSlice> volume_to_slices(const HuVolume& volume);

/// Renders the phantom and writes `slice_NNNN.dcm` files into `dir`.
PhantomTruth generate_phantom(const PhantomSpec& spec, const std::filesystem::path& dir);

struct CohortOptions {
  std::size_t cases = 10;
  double positive_frac = kDefaultPositiveFraction;
  std::uint64_t seed = 0;
  Dims dims{96, 96, 96};
  Spacing spacing{2.5, 2.5, 2.5};
  double noise_sigma_hu = kDefaultNoiseSigmaHu;
  std::size_t threads = 1;
};

struct CohortCase {
  std::string case_id;
  std::string path;  // relative to the cohort directory
  int label = 0;
  PhantomSpec spec;
  PhantomFeatures features{};
};

/// Deterministic per-case specs: exactly round(n * positive_frac) positives.
/// Does not touch the filesystem.
std::vector<CohortCase> plan_cohort(const CohortOptions& options);

/// Writes every case under `out_dir/<case_id>/`, plus `manifest.csv`
/// (case_id,path,label) and `features.csv` (case_id,label,<features>).
std::vector<CohortCase> generate_cohort(const CohortOptions& options, const std::filesystem::path& out_dir);

}  // namespace lungprep
