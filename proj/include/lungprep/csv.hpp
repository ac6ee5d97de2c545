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

// Plain comma-separated tables: no quoting, one header row, '#' lines and
// blank lines ignored.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lungprep {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws InvalidConfig when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Checks that the first columns of the header equal `expected`.
void require_header(const CsvTable& table, std::span<const std::string_view> expected, std::string_view what);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace lungprep
