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

#include "lungprep/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lungprep/error.hpp"
#include "lungprep/evaluate.hpp"

namespace lungprep {
namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

double sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

LossValue cross_entropy(double logit, int label) {
  const double y = label != 0 ? 1.0 : 0.0;
  return {std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit))), sigmoid(logit) - y};
}

LossValue focal_loss(double logit, int label, double alpha, double gamma) {
  const double p = sigmoid(logit);
  if (label != 0) {
    const double q = sigmoid(-logit);  // 1 - p without cancellation
    const double log_p = -softplus(-logit);
    const double weight = std::pow(q, gamma);
    return {-alpha * weight * log_p, alpha * weight * (gamma * p * log_p - q)};
  }
  const double log_q = -softplus(logit);
  const double weight = std::pow(p, gamma);
  return {-(1.0 - alpha) * weight * log_q, (1.0 - alpha) * weight * (p - gamma * sigmoid(-logit) * log_q)};
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(ErrorCode::LengthMismatch, "params, grads and Adam moments must have equal length");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double m_correction = 1.0 - std::pow(c.beta1, t);
  const double v_correction = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / m_correction;
    const double v_hat = state.v[i] / v_correction;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

std::vector<double> dropout(std::span<const double> x, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::InvalidRate, "dropout rate must lie in [0, 1)");
  std::vector<double> out(x.begin(), x.end());
  if (rate == 0.0) return out;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& v : out) v = rng.uniform() < rate ? 0.0 : v * keep_scale;
  return out;
}

double LogisticModel::logit(std::span<const double> features) const {
  double z = weights.back();
  for (std::size_t j = 0; j < features.size(); ++j) z += weights[j] * (features[j] - mean[j]) / scale[j];
  return z;
}

TrainResult train_logistic(const LabeledSet& train, const TrainConfig& config, const LabeledSet* validation) {
  const FeatureMatrix& x = train.features;
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (train.labels.size() != n || x.values.size() != n * d) {
    throw Error(ErrorCode::LengthMismatch, "feature rows and labels disagree");
  }
  if (n < 4) throw Error(ErrorCode::InvalidConfig, "training needs at least four examples");
  const auto positives = std::count_if(train.labels.begin(), train.labels.end(), [](int l) { return l != 0; });
  if (positives == 0 || static_cast<std::size_t>(positives) == n) {
    throw Error(ErrorCode::DegenerateLabels, "training labels contain a single class");
  }
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");

  TrainResult result;
  LogisticModel& model = result.model;
  model.mean.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x.values[i * d + j];
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x.values[i * d + j] - mu) * (x.values[i * d + j] - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    model.mean[j] = mu;
    model.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  model.weights.assign(d + 1, 0.0);

  auto loss_of = [&](double z, int y) {
    return config.loss == LossKind::Focal ? focal_loss(z, y, config.focal_alpha, config.focal_gamma)
                                          : cross_entropy(z, y);
  };
  auto scores_of = [&](const LabeledSet& set) {
    std::vector<double> s(set.features.rows);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = model.predict(set.features.row(i));
    return s;
  };

  AdamState adam(d + 1, config.adam);
  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> standardized(d);
  std::vector<double> grad(d + 1);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const auto row = x.row(order[k]);
        for (std::size_t j = 0; j < d; ++j) standardized[j] = (row[j] - model.mean[j]) / model.scale[j];
        const std::vector<double> input =
            config.dropout_rate > 0.0 ? dropout(standardized, config.dropout_rate, rng) : standardized;
        double z = model.weights[d];
        for (std::size_t j = 0; j < d; ++j) z += model.weights[j] * input[j];
        const double g = loss_of(z, train.labels[order[k]]).grad_wrt_logit;
        for (std::size_t j = 0; j < d; ++j) grad[j] += g * input[j];
        grad[d] += g;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (double& g : grad) g *= inv;
      adam_step(adam, model.weights, grad);
    }

    EpochStats stats;
    stats.epoch = epoch;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += loss_of(model.logit(x.row(i)), train.labels[i]).value;
    stats.train_loss = total / static_cast<double>(n);
    stats.train_auc = auc_mann_whitney(train.labels, scores_of(train));
    if (validation != nullptr) {
      const auto s = scores_of(*validation);
      const bool both = std::count(validation->labels.begin(), validation->labels.end(), 1) > 0 &&
                        std::count(validation->labels.begin(), validation->labels.end(), 0) > 0;
      if (both) stats.val_auc = auc_mann_whitney(validation->labels, s);
      stats.val_accuracy = accuracy(validation->labels, s);
    }
    result.trace.push_back(stats);
  }
  return result;
}

}  // namespace lungprep
