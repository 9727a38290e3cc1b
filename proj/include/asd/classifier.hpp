// include/asd/classifier.hpp

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

#pragma once

#include <cstdint>
#include <vector>

#include "asd/tensor.hpp"

namespace asd {

/// One linear probe per embedding row: p_j = sigmoid(w_j . g_j + b_j).
struct ClassifierParams {
  Tensor w;  // [heads, C]
  Tensor b;  // [heads]

  std::size_t heads() const { return w.dim(0); }
};

// w uniform in (-a, a) with a = sqrt(6 / (C + 1)); b = 0.
ClassifierParams init_classifier(std::size_t heads, std::size_t channels, std::uint64_t seed);

// g: [heads, C] -> probabilities [heads]. Head j only sees row j of g.
Tensor predict(const Tensor& embeddings, const ClassifierParams& params);

// Mean two-term binary cross-entropy over all heads, logs clamped at 1e-12.
// When has_noise_head, the last label must be 0.
Tensor classification_loss(const Tensor& probabilities, const Tensor& labels,
                           bool has_noise_head = true);

// cls + gamma * cmm.
Tensor total_loss(const Tensor& cls, const Tensor& cmm, double gamma);

struct AccuracyReport {
  double mean = 0.0;                   // percent
  std::vector<double> per_attribute;   // percent
};

// Thresholds probabilities at 0.5 (p >= 0.5 is positive). Only the first
// labels[i].numel() heads are scored, so the noise head never counts.
AccuracyReport evaluate_accuracy(const std::vector<Tensor>& predictions,
                                 const std::vector<Tensor>& labels);

}  // namespace asd
