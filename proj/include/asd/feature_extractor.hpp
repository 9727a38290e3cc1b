// include/asd/feature_extractor.hpp

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

#include "asd/asdt_io.hpp"
#include "asd/tensor.hpp"

namespace asd {

/// Small convolutional stack standing in for a deep backbone. Each stage is
/// same-padded conv -> ReLU -> average pool.
struct ExtractorConfig {
  std::size_t in_channels = 1;
  std::vector<std::size_t> stage_channels{16, 32};
  std::size_t kernel_size = 3;
  // One factor per stage; 1 disables pooling for that stage.
  std::vector<std::size_t> pool_factors{2, 2};

  void validate() const;
  std::size_t out_channels() const { return stage_channels.back(); }
  std::size_t total_pool() const;
};

struct ExtractorStage {
  Tensor kernel;  // [k, k, cin, cout]
  Tensor bias;    // [cout]
};

struct ExtractorWeights {
  std::vector<ExtractorStage> stages;

  std::vector<Tensor> parameters() const;
  void append_named(NamedTensors& out) const;
};

/// f in R^{H x W x C}.
struct FeatureMap {
  Tensor tensor;  // [H, W, C]
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t locations() const { return height * width; }
};

// Glorot-uniform kernels in (-a, a), a = sqrt(6 / (fan_in + fan_out)),
// fan = k*k*channels; zero biases. Parameters are created with requires_grad.
ExtractorWeights init_extractor(const ExtractorConfig& config, std::uint64_t seed);

// image: [h0, w0, in_channels]; h0 and w0 must be divisible by total_pool().
FeatureMap extract(const Tensor& image, const ExtractorConfig& config,
                   const ExtractorWeights& weights);

}  // namespace asd
