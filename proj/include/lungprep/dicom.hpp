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

// Minimal reader/writer for uncompressed little-endian CT slices.
//
// Only the tags needed to build a calibrated volume are extracted; every
// other element (including sequences of defined or undefined length) is
// skipped. Explicit and Implicit VR Little Endian are accepted; anything
// else is rejected with UnsupportedTransferSyntax.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lungprep/volume.hpp"

namespace lungprep {

inline constexpr std::string_view kImplicitVrLittleEndian = "1.2.840.10008.1.2";
inline constexpr std::string_view kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";

struct DicomSlice {
  std::uint16_t rows = 0;
  std::uint16_t cols = 0;
  std::uint16_t bits_allocated = 16;
  std::uint16_t pixel_representation = 0;  // 0 unsigned, 1 two's complement
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  double row_spacing_mm = 1.0;
  double col_spacing_mm = 1.0;
  double slice_thickness_mm = 1.0;
  double position_z_mm = 0.0;
  std::vector<std::int32_t> raw_pixels;  // rows * cols, row-major

  friend bool operator==(const DicomSlice&, const DicomSlice&) = default;
};

struct SeriesMeta {
  double slice_spacing_mm = 0.0;
  double row_spacing_mm = 0.0;
  double col_spacing_mm = 0.0;
  std::size_t slice_count = 0;
};

struct Series {
  HuVolume volume;
  SeriesMeta meta;
};

/// Relative deviation of a slice gap from the median gap before the series
/// is rejected as NonUniformSpacing.
inline constexpr double kSliceGapTolerance = 0.15;

DicomSlice parse_dicom_file(std::span<const std::uint8_t> bytes);
DicomSlice read_dicom_file(const std::filesystem::path& path);

/// Sorts by z, rescales to HU and stacks into a volume.
Series assemble_series(std::vector<DicomSlice> slices);

/// Parses every regular file in `dir` (name order) and assembles them.
Series load_series_directory(const std::filesystem::path& dir);

/// Serializes a slice as a Part 10 file (preamble, meta group, dataset) in
/// the requested transfer syntax. Pixel data is written as 16-bit words.
std::vector<std::uint8_t> encode_dicom_slice(const DicomSlice& slice,
                                             std::string_view transfer_syntax = kExplicitVrLittleEndian);

}  // namespace lungprep
