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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "lungprep/batch.hpp"
#include "lungprep/config.hpp"
#include "lungprep/csv.hpp"
#include "lungprep/error.hpp"
#include "lungprep/evaluate.hpp"
#include "lungprep/inflate3d.hpp"
#include "lungprep/objectives.hpp"
#include "lungprep/phantom.hpp"

namespace lungprep::cli {
namespace {

// Raised by handlers for bad invocations that CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_preprocess(const std::string& manifest, const std::string& out_dir, const std::string& config_path,
                   std::size_t threads, std::ostream& out) {
  RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
  if (threads > 0) config.threads = threads;
  const auto rows = read_manifest(manifest);
  const RunReport report = preprocess_batch(rows, config, out_dir);
  const std::string text = format_report(report);
  std::ofstream(std::filesystem::path(out_dir) / "report.txt") << text;
  out << "cases=" << report.cases.size() << " ok=" << report.ok << " segmentation_fallback=" << report.fallback
      << " error=" << report.failed << " wall_ms=" << format_real(report.wall_ms) << '\n';
  for (const auto& c : report.cases) {
    if (c.status == CaseStatus::Error) out << "failed " << c.case_id << ": " << c.message << '\n';
  }
  return report.any_failed() ? kExitCaseFailed : kExitOk;
}

int cmd_phantom(const CohortOptions& options, const std::string& out_dir, std::ostream& out) {
  const auto cases = generate_cohort(options, out_dir);
  std::size_t positives = 0;
  for (const auto& c : cases) positives += c.label;
  out << "cases=" << cases.size() << " positives=" << positives << " manifest="
      << (std::filesystem::path(out_dir) / "manifest.csv").string() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& scores_path, const std::string& roc_out, double threshold,
             const std::vector<double>& buckets, std::ostream& out) {
  const auto cases = read_scores_csv(scores_path);
  const RocCurve curve = roc_curve(cases);
  if (!roc_out.empty()) write_roc_csv(roc_out, curve);
  out << "auc=" << format_real(curve.auc) << '\n';
  out << "accuracy=" << format_real(accuracy(cases, threshold)) << '\n';
  if (!buckets.empty()) {
    std::vector<std::size_t> counts(buckets.size() + 1, 0);
    for (const auto& c : cases) ++counts[assign_bucket(c.score, buckets)];
    for (std::size_t b = 0; b < counts.size(); ++b) out << "bucket." << b << "=" << counts[b] << '\n';
  }
  return kExitOk;
}

int cmd_split(const std::string& manifest, double train_frac, std::uint64_t seed, const std::string& out_train,
              const std::string& out_test, std::ostream& out) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::ManifestNotFound, manifest);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  const SplitIndices parts = split_indices(lines.size(), train_frac, seed);
  auto write = [&](const std::string& path, const std::vector<std::size_t>& idx) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
    f << header << '\n';
    for (auto i : idx) f << lines[i] << '\n';
  };
  write(out_train, parts.train);
  write(out_test, parts.test);
  out << "train=" << parts.train.size() << " test=" << parts.test.size() << '\n';
  return kExitOk;
}

int cmd_inflate(const std::string& in_path, std::size_t depth, const std::string& out_path, std::ostream& out) {
  const AnyKernel k = read_lvw(in_path);
  const auto* k2 = std::get_if<Kernel2D<float>>(&k);
  if (k2 == nullptr) throw UsageError("inflate expects a rank-4 (2D) kernel");
  const Kernel3D<float> k3 = inflate_kernel(*k2, depth);
  write_lvw(out_path, k3);
  out << "shape=" << k3.kt << 'x' << k3.kh << 'x' << k3.kw << 'x' << k3.cin << 'x' << k3.cout << '\n';
  return kExitOk;
}

LabeledSet subset(const CsvTable& table, const std::vector<std::size_t>& idx, std::size_t label_col,
                  const std::vector<std::size_t>& feature_cols) {
  LabeledSet s;
  s.features.rows = idx.size();
  s.features.cols = feature_cols.size();
  for (auto i : idx) {
    s.labels.push_back(static_cast<int>(parse_int(table.rows[i][label_col])));
    for (auto c : feature_cols) s.features.values.push_back(parse_double(table.rows[i][c]));
  }
  return s;
}

int cmd_train_demo(const std::string& features_path, const TrainConfig& config, double train_frac,
                   const std::string& scores_out, std::ostream& out) {
  const CsvTable table = read_csv(features_path);
  static constexpr std::string_view kHeader[] = {"case_id", "label"};
  require_header(table, kHeader, "features CSV");
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 2; c < table.header.size(); ++c) feature_cols.push_back(c);
  if (feature_cols.empty()) throw UsageError("features CSV has no feature columns");

  const SplitIndices parts = split_indices(table.rows.size(), train_frac, config.seed);
  const LabeledSet train = subset(table, parts.train, 1, feature_cols);
  const LabeledSet test = subset(table, parts.test, 1, feature_cols);
  const TrainResult result = train_logistic(train, config, &test);
  for (const auto& e : result.trace) {
    out << "epoch=" << e.epoch << " train_loss=" << format_real(e.train_loss)
        << " train_auc=" << format_real(e.train_auc) << " val_auc=" << (e.val_auc ? format_real(*e.val_auc) : "n/a")
        << " val_accuracy=" << format_real(*e.val_accuracy) << '\n';
  }
  std::vector<ScoredCase> scored;
  for (std::size_t k = 0; k < parts.test.size(); ++k) {
    scored.push_back({table.rows[parts.test[k]][0], test.labels[k], result.model.predict(test.features.row(k))});
  }
  const bool both = std::count(test.labels.begin(), test.labels.end(), 1) > 0 &&
                    std::count(test.labels.begin(), test.labels.end(), 0) > 0;
  out << "train_cases=" << parts.train.size() << " test_cases=" << parts.test.size()
      << " held_out_auc=" << (both ? format_real(auc_mann_whitney(scored)) : "n/a") << '\n';
  if (!scores_out.empty()) write_scores_csv(scores_out, scored);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lungprep: CT preprocessing, filter inflation and evaluation toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // preprocess
  std::string manifest, out_dir, config_path;
  std::size_t threads = 0;
  auto* pre = app.add_subcommand("preprocess", "Preprocess every case of a manifest into LVOL tensors");
  pre->add_option("--manifest", manifest, "Manifest CSV (case_id,path,label)")->required();
  pre->add_option("--out", out_dir, "Output directory")->required();
  pre->add_option("--config", config_path, "key = value run configuration");
  pre->add_option("--threads", threads, "Worker count (overrides the config)");
  pre->callback([&] { action = [&] { return cmd_preprocess(manifest, out_dir, config_path, threads, out); }; });

  // phantom
  CohortOptions cohort;
  std::size_t phantom_size = 96;
  double phantom_spacing = 2.5;
  std::string phantom_out;
  auto* ph = app.add_subcommand("phantom", "Generate a synthetic thorax cohort as DICOM series");
  ph->add_option("--out", phantom_out, "Output directory")->required();
  ph->add_option("--cases", cohort.cases, "Number of cases")->required();
  ph->add_option("--positive-frac", cohort.positive_frac, "Fraction of cases with nodules")->capture_default_str();
  ph->add_option("--seed", cohort.seed, "Cohort seed")->capture_default_str();
  ph->add_option("--size", phantom_size, "Voxels per axis")->capture_default_str();
  ph->add_option("--spacing", phantom_spacing, "Isotropic voxel size in mm")->capture_default_str();
  ph->add_option("--noise", cohort.noise_sigma_hu, "Gaussian noise sigma in HU")->capture_default_str();
  ph->add_option("--threads", cohort.threads, "Worker count")->capture_default_str();
  ph->callback([&] {
    cohort.dims = {phantom_size, phantom_size, phantom_size};
    cohort.spacing = {phantom_spacing, phantom_spacing, phantom_spacing};
    action = [&] { return cmd_phantom(cohort, phantom_out, out); };
  });

  // eval
  std::string scores_path, roc_out;
  double eval_threshold = 0.5;
  std::vector<double> buckets;
  auto* ev = app.add_subcommand("eval", "ROC curve, AUC and accuracy for a scores CSV");
  ev->add_option("--scores", scores_path, "Scores CSV (case_id,label,score)")->required();
  ev->add_option("--roc-out", roc_out, "ROC CSV output");
  ev->add_option("--threshold", eval_threshold, "Decision threshold for accuracy")->capture_default_str();
  ev->add_option("--buckets", buckets, "Ascending risk-bucket thresholds in (0, 1)")->delimiter(',');
  ev->callback([&] { action = [&] { return cmd_eval(scores_path, roc_out, eval_threshold, buckets, out); }; });

  // split
  std::string split_manifest, out_train, out_test;
  double train_frac = 0.7;
  std::uint64_t split_seed = 0;
  auto* sp = app.add_subcommand("split", "Seeded train/test split of a manifest");
  sp->add_option("--manifest", split_manifest, "Manifest CSV")->required();
  sp->add_option("--train-frac", train_frac, "Training fraction")->capture_default_str();
  sp->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();
  sp->add_option("--out-train", out_train, "Training manifest output")->required();
  sp->add_option("--out-test", out_test, "Test manifest output")->required();
  sp->callback([&] {
    action = [&] { return cmd_split(split_manifest, train_frac, split_seed, out_train, out_test, out); };
  });

  // inflate
  std::string lvw_in, lvw_out;
  std::size_t depth = 1;
  auto* inf = app.add_subcommand("inflate", "Inflate a 2D LVW kernel to 3D");
  inf->add_option("--in", lvw_in, "Rank-4 LVW input")->required();
  inf->add_option("--depth", depth, "Temporal extent N")->required()->check(CLI::PositiveNumber);
  inf->add_option("--out", lvw_out, "Rank-5 LVW output")->required();
  inf->callback([&] { action = [&] { return cmd_inflate(lvw_in, depth, lvw_out, out); }; });

  // train-demo
  std::string features_path, loss_name = "ce", train_scores_out;
  TrainConfig train_cfg;
  double demo_train_frac = 0.7;
  auto* td = app.add_subcommand("train-demo", "Logistic fine-tuning recipe on phantom features");
  td->add_option("--features", features_path, "Features CSV (case_id,label,features...)")->required();
  td->add_option("--epochs", train_cfg.epochs, "Epochs")->capture_default_str();
  td->add_option("--loss", loss_name, "ce or focal")->check(CLI::IsMember({"ce", "focal"}))->capture_default_str();
  td->add_option("--seed", train_cfg.seed, "Split and shuffle seed")->capture_default_str();
  td->add_option("--lr", train_cfg.adam.lr, "Adam learning rate")->capture_default_str();
  td->add_option("--batch-size", train_cfg.batch_size, "Mini-batch size")->capture_default_str();
  td->add_option("--dropout", train_cfg.dropout_rate, "Drop probability on inputs, in [0, 1)")->capture_default_str();
  td->add_option("--train-frac", demo_train_frac, "Training fraction")->capture_default_str();
  td->add_option("--scores-out", train_scores_out, "Write held-out scores CSV");
  td->callback([&] {
    train_cfg.loss = loss_name == "focal" ? LossKind::Focal : LossKind::CrossEntropy;
    action = [&] { return cmd_train_demo(features_path, train_cfg, demo_train_frac, train_scores_out, out); };
  });

  std::vector<const char*> argv{"lungprep"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::ManifestNotFound || e.code() == ErrorCode::InvalidConfig;
    return usage ? kExitUsage : kExitCaseFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCaseFailed;
  }
}

}  // namespace lungprep::cli
