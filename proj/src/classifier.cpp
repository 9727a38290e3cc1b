// src/classifier.cpp

// Copyright 2026  ASD authors

// See the LICENSE file for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "asd/classifier.hpp"

#include <cmath>
#include <string>

#include "asd/errors.hpp"
#include "asd/rng.hpp"

namespace asd {

ClassifierParams init_classifier(std::size_t heads, std::size_t channels, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = std::sqrt(6.0 / static_cast<double>(channels + 1));
  std::vector<double> w(heads * channels);
  for (auto& v : w) v = rng.uniform(-bound, bound);
  return {Tensor({heads, channels}, std::move(w), true), Tensor::zeros({heads}, true)};
}

Tensor predict(const Tensor& embeddings, const ClassifierParams& params) {
  if (embeddings.shape() != params.w.shape() || params.b.ndim() != 1 ||
      params.b.dim(0) != params.heads()) {
    throw DimensionError("predict: embeddings " + shape_str(embeddings.shape()) +
                         " do not match classifier weights " + shape_str(params.w.shape()) +
                         " / bias " + shape_str(params.b.shape()));
  }
  return sigmoid(add(sum_cols(mul(params.w, embeddings)), params.b));
}

Tensor classification_loss(const Tensor& probabilities, const Tensor& labels,
                           bool has_noise_head) {
  if (probabilities.ndim() != 1 || labels.shape() != probabilities.shape()) {
    throw DimensionError("classification_loss: probabilities " +
                         shape_str(probabilities.shape()) + " vs labels " +
                         shape_str(labels.shape()));
  }
  if (has_noise_head && labels.data().back() != 0.0) {
    throw ContractError("classification_loss: the noise head label must be 0");
  }
  const Tensor one = Tensor::scalar(1.0);
  const Tensor positive = mul(labels, log(probabilities));
  const Tensor negative = mul(sub(one, labels), log(sub(one, probabilities)));
  return scalar_mul(mean_all(add(positive, negative)), -1.0);
}

Tensor total_loss(const Tensor& cls, const Tensor& cmm, double gamma) {
  if (gamma < 0.0) throw ContractError("total_loss: gamma must be non-negative");
  return add(cls, scalar_mul(cmm, gamma));
}

AccuracyReport evaluate_accuracy(const std::vector<Tensor>& predictions,
                                 const std::vector<Tensor>& labels) {
  if (predictions.empty()) throw DomainError("evaluate_accuracy: no predictions");
  if (predictions.size() != labels.size()) {
    throw DimensionError("evaluate_accuracy: " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(labels.size()) + " label sets");
  }
  const std::size_t d = labels.front().numel();
  std::vector<std::size_t> correct(d, 0);
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (labels[s].numel() != d || predictions[s].numel() < d) {
      throw DimensionError("evaluate_accuracy: sample " + std::to_string(s) +
                           " has inconsistent head count");
    }
    for (std::size_t j = 0; j < d; ++j) {
      const bool predicted = predictions[s][j] >= 0.5;
      const bool actual = labels[s][j] >= 0.5;
      if (predicted == actual) ++correct[j];
    }
  }
  AccuracyReport report;
  const double n = static_cast<double>(predictions.size());
  for (std::size_t j = 0; j < d; ++j) {
    report.per_attribute.push_back(100.0 * static_cast<double>(correct[j]) / n);
    report.mean += report.per_attribute.back();
  }
  report.mean /= static_cast<double>(d);
  return report;
}

}  // namespace asd
