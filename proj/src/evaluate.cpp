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

#include "lungprep/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "lungprep/csv.hpp"
#include "lungprep/error.hpp"
#include "lungprep/rng.hpp"

namespace lungprep {
namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts count_classes(std::span<const int> labels) {
  ClassCounts c;
  for (int l : labels) (l != 0 ? c.pos : c.neg)++;
  if (c.pos == 0 || c.neg == 0) {
    throw Error(ErrorCode::DegenerateLabels, "both classes must be present");
  }
  return c;
}

void unpack(std::span<const ScoredCase> cases, std::vector<int>& labels, std::vector<double>& scores) {
  labels.reserve(cases.size());
  scores.reserve(cases.size());
  for (const auto& c : cases) {
    if (std::isnan(c.score)) throw Error(ErrorCode::InvalidConfig, "NaN score for " + c.case_id);
    labels.push_back(c.label);
    scores.push_back(c.score);
  }
}

}  // namespace

RocCurve roc_curve(std::span<const ScoredCase> cases) {
  std::vector<int> labels;
  std::vector<double> scores;
  unpack(cases, labels, scores);
  const ClassCounts counts = count_classes(labels);

  std::vector<std::size_t> order(cases.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] != 0 ? tp : fp)++;
    curve.points.push_back({s, static_cast<double>(fp) / static_cast<double>(counts.neg),
                            static_cast<double>(tp) / static_cast<double>(counts.pos)});
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return curve;
}

double auc_mann_whitney(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw Error(ErrorCode::LengthMismatch, "labels and scores differ in length");
  const ClassCounts counts = count_classes(labels);
  if (std::any_of(scores.begin(), scores.end(), [](double s) { return std::isnan(s); })) {
    throw Error(ErrorCode::InvalidConfig, "NaN score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the midrank of each tie group keeps the rank sum integral.
  std::uint64_t positive_rank_x2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t positives = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) positives += labels[order[j++]] != 0;
    positive_rank_x2 += positives * (i + j + 1);
    i = j;
  }
  const std::uint64_t u_x2 = positive_rank_x2 - counts.pos * (counts.pos + 1);
  return static_cast<double>(u_x2) / (2.0 * static_cast<double>(counts.pos) * static_cast<double>(counts.neg));
}

double auc_mann_whitney(std::span<const ScoredCase> cases) {
  std::vector<int> labels;
  std::vector<double> scores;
  unpack(cases, labels, scores);
  return auc_mann_whitney(labels, scores);
}

double accuracy(std::span<const int> labels, std::span<const double> scores, double threshold) {
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "accuracy of an empty set");
  if (labels.size() != scores.size()) throw Error(ErrorCode::LengthMismatch, "labels and scores differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += (scores[i] >= threshold) == (labels[i] != 0);
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double accuracy(std::span<const ScoredCase> cases, double threshold) {
  std::vector<int> labels;
  std::vector<double> scores;
  unpack(cases, labels, scores);
  return accuracy(labels, scores, threshold);
}

std::size_t assign_bucket(double score, std::span<const double> thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0) || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw Error(ErrorCode::UnsortedThresholds, "thresholds must be strictly ascending inside (0, 1)");
    }
  }
  return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), score) - thresholds.begin());
}

SplitIndices split_indices(std::size_t n, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  // The epsilon keeps products like 10 * 0.7 from flooring to 6.
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_frac + 1e-9));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.test.assign(order.begin() + n_train, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitIds split(std::span<const std::string> ids, double train_frac, std::uint64_t seed) {
  const SplitIndices idx = split_indices(ids.size(), train_frac, seed);
  SplitIds out;
  for (auto i : idx.train) out.train.push_back(ids[i]);
  for (auto i : idx.test) out.test.push_back(ids[i]);
  return out;
}

std::vector<ScoredCase> read_scores_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  static constexpr std::string_view kHeader[] = {"case_id", "label", "score"};
  require_header(table, kHeader, "scores CSV");
  std::vector<ScoredCase> out;
  for (const auto& row : table.rows) {
    ScoredCase c{row[0], static_cast<int>(parse_int(row[1])), parse_double(row[2])};
    if (c.label != 0 && c.label != 1) throw Error(ErrorCode::InvalidConfig, "label must be 0 or 1 for " + c.case_id);
    if (!(c.score >= 0.0 && c.score <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "score outside [0, 1] for " + c.case_id);
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_scores_csv(const std::filesystem::path& path, std::span<const ScoredCase> cases) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "case_id,label,score\n";
  for (const auto& c : cases) out << c.case_id << ',' << c.label << ',' << format_real(c.score) << '\n';
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out << (std::isinf(p.threshold) ? std::string("inf") : format_real(p.threshold)) << ',' << format_real(p.fpr)
        << ',' << format_real(p.tpr) << '\n';
  }
  out << "# auc=" << format_real(curve.auc) << '\n';
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace lungprep
