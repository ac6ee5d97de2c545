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

// Run configuration as flat `key = value` text with `#` comments.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lungprep/lung_segment.hpp"
#include "lungprep/resample.hpp"
#include "lungprep/volume.hpp"
#include "lungprep/window_crop.hpp"

namespace lungprep {

struct RunConfig {
  double target_spacing_mm = kDefaultTargetSpacingMm;
  int window_lo_hu = kDefaultWindowLoHu;
  int window_hi_hu = kDefaultWindowHiHu;
  Dims crop_size{kDefaultCropSize, kDefaultCropSize, kDefaultCropSize};
  int air_threshold_hu = kDefaultAirThresholdHu;
  int close_radius = kDefaultCloseRadius;
  Connectivity connectivity = Connectivity::Six;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Rejects unknown keys, malformed values and out-of-range parameters with
/// InvalidConfig. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key, one per line, in a fixed order; parse_config() inverts it.
std::string serialize_config(const RunConfig& config, std::string_view key_prefix = "");

void validate_config(const RunConfig& config);

}  // namespace lungprep
