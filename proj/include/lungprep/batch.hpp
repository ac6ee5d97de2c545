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

// Case preprocessing and the parallel batch runner.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lungprep/config.hpp"
#include "lungprep/lung_segment.hpp"
#include "lungprep/volume.hpp"

namespace lungprep {

struct ManifestRow {
  std::string case_id;
  std::filesystem::path path;  // resolved against the manifest's directory
  int label = 0;
};

/// CSV `case_id,path,label`. Throws ManifestNotFound if the file is absent.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

struct CaseOutcome {
  PreprocessedTensor tensor;                     // exactly config.crop_size
  std::optional<LungSegmentation> segmentation;  // empty on fallback
  Index3 crop_center;
  Dims resampled_dims;
  Spacing resampled_spacing;
  bool fallback = false;
};

/// resample -> segment -> window -> crop. When segmentation finds no
/// interior lung the crop is taken about the volume center and `fallback`
/// is set instead of failing.
CaseOutcome preprocess_volume(const HuVolume& volume, const RunConfig& config);

enum class CaseStatus { Ok, SegmentationFallback, Error };
std::string_view to_string(CaseStatus status);

struct CaseReport {
  std::string case_id;
  CaseStatus status = CaseStatus::Error;
  std::string message;
  double wall_ms = 0.0;
};

struct RunReport {
  RunConfig config;
  std::vector<CaseReport> cases;  // manifest order
  std::size_t ok = 0;
  std::size_t fallback = 0;
  std::size_t failed = 0;
  double wall_ms = 0.0;

  bool any_failed() const { return failed > 0; }
};

/// Processes every row on config.threads workers and writes
/// `<out_dir>/<case_id>.lvol`. Per-case failures are recorded, never thrown.
RunReport preprocess_batch(const std::vector<ManifestRow>& rows, const RunConfig& config,
                           const std::filesystem::path& out_dir);

/// Line-oriented key=value rendering, config echoed under `config.`.
std::string format_report(const RunReport& report);

/// Recovers the echoed configuration from format_report() output.
RunConfig config_from_report(std::string_view report_text);

}  // namespace lungprep
