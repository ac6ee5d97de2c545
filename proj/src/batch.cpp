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

#include "lungprep/batch.hpp"

#include <chrono>
#include <sstream>

#include "lungprep/csv.hpp"
#include "lungprep/dicom.hpp"
#include "lungprep/error.hpp"
#include "lungprep/evaluate.hpp"
#include "lungprep/lvol.hpp"
#include "lungprep/parallel.hpp"
#include "lungprep/resample.hpp"
#include "lungprep/window_crop.hpp"

namespace lungprep {

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::ManifestNotFound, path.string());
  }
  const CsvTable table = read_csv(path);
  static constexpr std::string_view kHeader[] = {"case_id", "path", "label"};
  require_header(table, kHeader, "manifest");
  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    std::filesystem::path p(r[1]);
    if (p.is_relative()) p = base / p;
    rows.push_back({r[0], p, static_cast<int>(parse_int(r[2]))});
  }
  return rows;
}

CaseOutcome preprocess_volume(const HuVolume& volume, const RunConfig& config) {
  const double s = config.target_spacing_mm;
  const HuVolume resampled = trilinear_resample(volume, Spacing{s, s, s});

  CaseOutcome out;
  out.resampled_dims = resampled.dims;
  out.resampled_spacing = resampled.spacing;
  try {
    out.segmentation =
        segment_lungs(resampled, config.air_threshold_hu, config.close_radius, config.connectivity);
    out.crop_center = out.segmentation->bbox.center;
  } catch (const Error& e) {
    // Closing can in principle erase a thin interior mask, hence EmptyMask.
    if (e.code() != ErrorCode::SegmentationEmpty && e.code() != ErrorCode::EmptyMask) throw;
    out.fallback = true;
    out.crop_center = {static_cast<std::int64_t>(resampled.dims.depth / 2),
                       static_cast<std::int64_t>(resampled.dims.height / 2),
                       static_cast<std::int64_t>(resampled.dims.width / 2)};
  }
  const PreprocessedTensor windowed = window_hu(resampled, config.window_lo_hu, config.window_hi_hu);
  // Zero is the windowed image of air, so padding reads as air.
  out.tensor = crop_centered<std::uint8_t>(windowed, out.crop_center, config.crop_size, 0);
  return out;
}

std::string_view to_string(CaseStatus status) {
  switch (status) {
    case CaseStatus::Ok: return "ok";
    case CaseStatus::SegmentationFallback: return "segmentation-fallback";
    case CaseStatus::Error: return "error";
  }
  return "error";
}

RunReport preprocess_batch(const std::vector<ManifestRow>& rows, const RunConfig& config,
                           const std::filesystem::path& out_dir) {
  using Clock = std::chrono::steady_clock;
  validate_config(config);
  std::filesystem::create_directories(out_dir);

  RunReport report;
  report.config = config;
  report.cases.resize(rows.size());
  const auto started = Clock::now();

  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    CaseReport& entry = report.cases[i];
    entry.case_id = rows[i].case_id;
    try {
      const Series series = load_series_directory(rows[i].path);
      const CaseOutcome outcome = preprocess_volume(series.volume, config);
      write_lvol(out_dir / (rows[i].case_id + ".lvol"), outcome.tensor);
      entry.status = outcome.fallback ? CaseStatus::SegmentationFallback : CaseStatus::Ok;
      if (outcome.fallback) entry.message = "no interior lung component; cropped about the volume center";
    } catch (const std::exception& e) {
      entry.status = CaseStatus::Error;
      entry.message = e.what();
    }
    entry.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  });

  report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  for (const auto& c : report.cases) {
    switch (c.status) {
      case CaseStatus::Ok: ++report.ok; break;
      case CaseStatus::SegmentationFallback: ++report.fallback; break;
      case CaseStatus::Error: ++report.failed; break;
    }
  }
  return report;
}

std::string format_report(const RunReport& report) {
  std::ostringstream out;
  out << serialize_config(report.config, "config.");
  out << "totals.cases = " << report.cases.size() << '\n';
  out << "totals.ok = " << report.ok << '\n';
  out << "totals.segmentation_fallback = " << report.fallback << '\n';
  out << "totals.error = " << report.failed << '\n';
  out << "totals.wall_ms = " << format_real(report.wall_ms) << '\n';
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    const auto& c = report.cases[i];
    const std::string key = "case." + std::to_string(i) + ".";
    out << key << "id = " << c.case_id << '\n';
    out << key << "status = " << to_string(c.status) << '\n';
    out << key << "wall_ms = " << format_real(c.wall_ms) << '\n';
    if (!c.message.empty()) {
      std::string msg = c.message;
      for (char& ch : msg) {
        if (ch == '\n' || ch == '\r') ch = ' ';
      }
      out << key << "message = " << msg << '\n';
    }
  }
  return out.str();
}

RunConfig config_from_report(std::string_view report_text) {
  std::string config_text;
  std::size_t start = 0;
  while (start < report_text.size()) {
    std::size_t end = report_text.find('\n', start);
    if (end == std::string_view::npos) end = report_text.size();
    const std::string_view line = report_text.substr(start, end - start);
    if (line.starts_with("config.")) {
      config_text.append(line.substr(7));
      config_text.push_back('\n');
    }
    start = end + 1;
  }
  return parse_config(config_text);
}

}  // namespace lungprep
