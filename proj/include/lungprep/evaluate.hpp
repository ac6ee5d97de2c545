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

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lungprep {

struct ScoredCase {
  std::string case_id;
  int label = 0;
  double score = 0.0;
};

/// One vertex of the ROC curve. The leading (0, 0) vertex carries an
/// infinite threshold.
struct RocPoint {
  double threshold = std::numeric_limits<double>::infinity();
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Sweeps thresholds over the distinct scores, highest first; tied scores
/// form a single vertex. AUC is the trapezoidal area under the vertices.
RocCurve roc_curve(std::span<const ScoredCase> cases);

/// Pairwise-ranking AUC with half credit for ties, computed from midranks.
double auc_mann_whitney(std::span<const ScoredCase> cases);
double auc_mann_whitney(std::span<const int> labels, std::span<const double> scores);

/// Fraction of cases where (score >= threshold) agrees with the label.
double accuracy(std::span<const ScoredCase> cases, double threshold = 0.5);
double accuracy(std::span<const int> labels, std::span<const double> scores, double threshold = 0.5);

/// Number of thresholds <= score. Thresholds must be strictly ascending and
/// inside (0, 1); there are no built-in clinical defaults.
std::size_t assign_bucket(double score, std::span<const double> thresholds);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1 (xoshiro256**, Fisher-Yates); the first
/// floor(n * train_frac) shuffled indices form the training set. Both parts
/// are returned in ascending index order.
SplitIndices split_indices(std::size_t n, double train_frac, std::uint64_t seed);

struct SplitIds {
  std::vector<std::string> train;
  std::vector<std::string> test;
};
SplitIds split(std::span<const std::string> ids, double train_frac, std::uint64_t seed);

/// CSV with header `case_id,label,score`.
std::vector<ScoredCase> read_scores_csv(const std::filesystem::path& path);
void write_scores_csv(const std::filesystem::path& path, std::span<const ScoredCase> cases);

/// CSV with header `threshold,fpr,tpr` and a trailing `# auc=<value>` line.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

/// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_real(double v);

}  // namespace lungprep
