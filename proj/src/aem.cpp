// src/aem.cpp

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

#include "asd/aem.hpp"

#include <cmath>
#include <string>

#include "asd/errors.hpp"
#include "asd/rng.hpp"

namespace asd {

LatentFactors init_latent_factors(std::size_t num_attributes, std::size_t channels,
                                  std::uint64_t seed, bool with_noise_factor) {
  if (num_attributes < 1 || channels < 1) {
    throw ContractError("init_latent_factors: need D >= 1 and C >= 1");
  }
  const std::size_t rows = num_attributes + (with_noise_factor ? 1 : 0);
  Rng rng(seed);
  std::vector<double> values(rows * channels);
  for (std::size_t r = 0; r < rows; ++r) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t c = 0; c < channels; ++c) {
        const double v = rng.normal();
        values[r * channels + c] = v;
        norm2 += v * v;
      }
    } while (std::sqrt(norm2) < 1e-8);
  }
  return {Tensor({rows, channels}, std::move(values), true), with_noise_factor};
}

Tensor flatten_feature(const FeatureMap& f) {
  return reshape(f.tensor, {f.locations(), f.channels});
}

FeatureMap unflatten_feature(const Tensor& flat, std::size_t height, std::size_t width) {
  if (flat.ndim() != 2 || flat.dim(0) != height * width) {
    throw DimensionError("unflatten_feature: " + shape_str(flat.shape()) + " is not " +
                         std::to_string(height * width) + " locations");
  }
  const auto channels = flat.dim(1);
  return {reshape(flat, {height, width, channels}), height, width, channels};
}

Tensor assign(const Tensor& f_flat, const LatentFactors& z, double eps) {
  if (f_flat.ndim() != 2 || f_flat.dim(1) != z.channels()) {
    throw DimensionError("assign: features " + shape_str(f_flat.shape()) +
                         " and latent factors " + shape_str(z.z.shape()) +
                         " disagree on channel count");
  }
  const Tensor similarity =
      matmul(row_l2_normalize(f_flat, eps), transpose(row_l2_normalize(z.z, eps)));
  return softmax_rows(similarity);
}

Tensor embed(const Tensor& assignment, const Tensor& f_flat, bool add_mean_feature) {
  if (assignment.ndim() != 2 || f_flat.ndim() != 2 || assignment.dim(0) != f_flat.dim(0)) {
    throw DimensionError("embed: assignment " + shape_str(assignment.shape()) +
                         " and features " + shape_str(f_flat.shape()) +
                         " disagree on location count");
  }
  Tensor g = matmul(transpose(assignment), f_flat);
  if (add_mean_feature) g = add(g, mean_rows(f_flat));
  return g;
}

AemOutput aem_forward(const FeatureMap& f, const LatentFactors& z, bool add_mean_feature) {
  if (f.channels != z.channels()) {
    throw DimensionError("aem_forward: feature map has " + std::to_string(f.channels) +
                         " channels, latent factors have " + std::to_string(z.channels()));
  }
  const Tensor flat = flatten_feature(f);
  Tensor a = assign(flat, z);
  Tensor g = embed(a, flat, add_mean_feature);
  return {std::move(g), std::move(a)};
}

}  // namespace asd
