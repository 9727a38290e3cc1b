// src/feature_extractor.cpp

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

#include "asd/feature_extractor.hpp"

#include <cmath>
#include <string>

#include "asd/errors.hpp"
#include "asd/rng.hpp"

namespace asd {

void ExtractorConfig::validate() const {
  if (in_channels == 0) throw ConfigError("extractor: in_channels must be positive");
  if (stage_channels.empty()) throw ConfigError("extractor: at least one stage is required");
  for (auto c : stage_channels) {
    if (c == 0) throw ConfigError("extractor: stage channel counts must be positive");
  }
  if (kernel_size == 0 || kernel_size % 2 == 0) {
    throw ConfigError("extractor: kernel_size must be odd, got " + std::to_string(kernel_size));
  }
  if (pool_factors.size() != stage_channels.size()) {
    throw ConfigError("extractor: " + std::to_string(pool_factors.size()) +
                      " pool factors for " + std::to_string(stage_channels.size()) + " stages");
  }
  for (auto p : pool_factors) {
    if (p == 0) throw ConfigError("extractor: pool factors must be positive");
  }
}

std::size_t ExtractorConfig::total_pool() const {
  std::size_t p = 1;
  for (auto f : pool_factors) p *= f;
  return p;
}

std::vector<Tensor> ExtractorWeights::parameters() const {
  std::vector<Tensor> out;
  for (const auto& s : stages) {
    out.push_back(s.kernel);
    out.push_back(s.bias);
  }
  return out;
}

void ExtractorWeights::append_named(NamedTensors& out) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    out.emplace_back("stage" + std::to_string(i) + ".kernel", stages[i].kernel);
    out.emplace_back("stage" + std::to_string(i) + ".bias", stages[i].bias);
  }
}

ExtractorWeights init_extractor(const ExtractorConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ExtractorWeights weights;
  std::size_t cin = config.in_channels;
  const std::size_t k = config.kernel_size;
  for (std::size_t cout : config.stage_channels) {
    const double fan_in = static_cast<double>(k * k * cin);
    const double fan_out = static_cast<double>(k * k * cout);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> values(k * k * cin * cout);
    for (auto& v : values) {
      do {
        v = rng.uniform(-bound, bound);
      } while (v == -bound);
    }
    weights.stages.push_back({Tensor({k, k, cin, cout}, std::move(values), true),
                              Tensor::zeros({cout}, true)});
    cin = cout;
  }
  return weights;
}

FeatureMap extract(const Tensor& image, const ExtractorConfig& config,
                   const ExtractorWeights& weights) {
  if (image.ndim() != 3 || image.dim(2) != config.in_channels) {
    throw DimensionError("extract: image shape " + shape_str(image.shape()) +
                         " does not match in_channels " + std::to_string(config.in_channels));
  }
  if (weights.stages.size() != config.stage_channels.size()) {
    throw DimensionError("extract: " + std::to_string(weights.stages.size()) +
                         " weight stages for " + std::to_string(config.stage_channels.size()) +
                         " configured stages");
  }
  const auto divisor = config.total_pool();
  if (image.dim(0) % divisor != 0 || image.dim(1) % divisor != 0) {
    throw ConfigError("extract: image size " + std::to_string(image.dim(0)) + "x" +
                      std::to_string(image.dim(1)) + " must be divisible by " +
                      std::to_string(divisor));
  }
  Tensor x = image;
  for (std::size_t i = 0; i < weights.stages.size(); ++i) {
    x = relu(conv2d_same(x, weights.stages[i].kernel, weights.stages[i].bias));
    if (config.pool_factors[i] > 1) x = avg_pool(x, config.pool_factors[i]);
  }
  return {x, x.dim(0), x.dim(1), x.dim(2)};
}

}  // namespace asd
