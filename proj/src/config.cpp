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

#include "lungprep/config.hpp"

#include <fstream>
#include <sstream>

#include "lungprep/csv.hpp"
#include "lungprep/error.hpp"
#include "lungprep/evaluate.hpp"

namespace lungprep {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::size_t parse_count(std::string_view v, std::string_view key) {
  const long long n = parse_int(v);
  if (n < 0) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be non-negative");
  return static_cast<std::size_t>(n);
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (!(c.target_spacing_mm > 0.0)) throw Error(ErrorCode::InvalidConfig, "target_spacing_mm must be positive");
  if (c.window_lo_hu >= c.window_hi_hu) throw Error(ErrorCode::InvalidConfig, "window_lo_hu must be below window_hi_hu");
  if (c.crop_size.count() == 0) throw Error(ErrorCode::InvalidConfig, "crop size components must be positive");
  if (c.close_radius < 0) throw Error(ErrorCode::InvalidConfig, "close_radius must be >= 0");
  if (c.threads == 0) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "target_spacing_mm") {
      c.target_spacing_mm = parse_double(value);
    } else if (key == "window_lo_hu") {
      c.window_lo_hu = static_cast<int>(parse_int(value));
    } else if (key == "window_hi_hu") {
      c.window_hi_hu = static_cast<int>(parse_int(value));
    } else if (key == "crop_depth") {
      c.crop_size.depth = parse_count(value, key);
    } else if (key == "crop_height") {
      c.crop_size.height = parse_count(value, key);
    } else if (key == "crop_width") {
      c.crop_size.width = parse_count(value, key);
    } else if (key == "air_threshold_hu") {
      c.air_threshold_hu = static_cast<int>(parse_int(value));
    } else if (key == "close_radius") {
      c.close_radius = static_cast<int>(parse_int(value));
    } else if (key == "connectivity") {
      const long long n = parse_int(value);
      if (n != 6 && n != 26) throw Error(ErrorCode::InvalidConfig, "connectivity must be 6 or 26");
      c.connectivity = n == 6 ? Connectivity::Six : Connectivity::TwentySix;
    } else if (key == "threads") {
      c.threads = parse_count(value, key);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_count(value, key));
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + std::string(key) + "'");
    }
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c, std::string_view prefix) {
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) { out << prefix << key << " = " << value << '\n'; };
  line("target_spacing_mm", format_real(c.target_spacing_mm));
  line("window_lo_hu", std::to_string(c.window_lo_hu));
  line("window_hi_hu", std::to_string(c.window_hi_hu));
  line("crop_depth", std::to_string(c.crop_size.depth));
  line("crop_height", std::to_string(c.crop_size.height));
  line("crop_width", std::to_string(c.crop_size.width));
  line("air_threshold_hu", std::to_string(c.air_threshold_hu));
  line("close_radius", std::to_string(c.close_radius));
  line("connectivity", std::to_string(static_cast<int>(c.connectivity)));
  line("threads", std::to_string(c.threads));
  line("seed", std::to_string(c.seed));
  return out.str();
}

}  // namespace lungprep
