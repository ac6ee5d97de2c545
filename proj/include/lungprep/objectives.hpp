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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lungprep/rng.hpp"

namespace lungprep {

struct LossValue {
  double value = 0.0;
  double grad_wrt_logit = 0.0;
};

double sigmoid(double logit);

/// Binary cross-entropy on a logit, evaluated as
/// max(z, 0) - z*y + log(1 + exp(-|z|)). Gradient is sigmoid(z) - y.
LossValue cross_entropy(double logit, int label);

/// -alpha * y * (1-p)^gamma * ln p - (1-alpha) * (1-y) * p^gamma * ln(1-p)
/// with p = sigmoid(logit); logs are taken through softplus so neither
/// branch evaluates ln 0.
LossValue focal_loss(double logit, int label, double alpha = 0.25, double gamma = 2.0);

struct AdamConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg = {}) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update, in place. Throws LengthMismatch unless
/// params, grads and the state moments all have the same length.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

/// Inverted dropout: zero with probability `rate`, scale survivors by
/// 1 / (1 - rate). `rate` is the drop probability and must lie in [0, 1).
std::vector<double> dropout(std::span<const double> x, double rate, Rng& rng);

enum class LossKind { CrossEntropy, Focal };

struct TrainConfig {
  LossKind loss = LossKind::CrossEntropy;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  AdamConfig adam;
  std::size_t epochs = 40;
  std::size_t batch_size = 2;
  double dropout_rate = 0.0;  // applied to standardized inputs during training
  std::uint64_t seed = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean over the training set after the epoch
  double train_auc = 0.0;
  std::optional<double> val_auc;  // empty when the validation set has one class
  std::optional<double> val_accuracy;
};

/// Logistic model over standardized features. `weights` holds one entry per
/// feature followed by the bias.
struct LogisticModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;

  double logit(std::span<const double> features) const;
  double predict(std::span<const double> features) const { return sigmoid(logit(features)); }
};

struct TrainResult {
  LogisticModel model;
  std::vector<EpochStats> trace;
};

/// Row-major n x d feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

struct LabeledSet {
  FeatureMatrix features;
  std::vector<int> labels;
};

/// Mini-batch training with the configured loss and Adam, weights starting
/// at zero. Needs n >= 4 and both classes (DegenerateLabels otherwise).
/// When `validation` is given its AUC and accuracy are traced per epoch.
TrainResult train_logistic(const LabeledSet& train, const TrainConfig& config,
                           const LabeledSet* validation = nullptr);

}  // namespace lungprep
