// include/asd/aem.hpp

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

#include "asd/feature_extractor.hpp"
#include "asd/tensor.hpp"

namespace asd {

/// Learnable latent factors z, one row per attribute plus (optionally) a
/// final noise row that absorbs attribute-irrelevant content.
struct LatentFactors {
  Tensor z;  // [factors, C]
  bool has_noise_factor = true;

  std::size_t factors() const { return z.dim(0); }
  std::size_t channels() const { return z.dim(1); }
  std::size_t attributes() const { return has_noise_factor ? factors() - 1 : factors(); }
};

// Entries i.i.d. N(0, 1) by Box-Muller; rows with norm < 1e-8 are redrawn.
// Produces D+1 rows when with_noise_factor, else D.
LatentFactors init_latent_factors(std::size_t num_attributes, std::size_t channels,
                                  std::uint64_t seed, bool with_noise_factor = true);

// [H, W, C] -> [M, C] with M = H*W; row i is location (i / W, i % W).
Tensor flatten_feature(const FeatureMap& f);
FeatureMap unflatten_feature(const Tensor& flat, std::size_t height, std::size_t width);

/// Assignment matrix A [M, factors]: softmax over factors of the cosine
/// similarity between each location feature and each latent factor.
Tensor assign(const Tensor& f_flat, const LatentFactors& z, double eps = 1e-12);

/// Embeddings g [factors, C] = A^T f' (+ per-channel feature mean in every row).
Tensor embed(const Tensor& assignment, const Tensor& f_flat, bool add_mean_feature = true);

struct AemOutput {
  Tensor embeddings;  // g
  Tensor assignment;  // A, kept for heatmap export
};

AemOutput aem_forward(const FeatureMap& f, const LatentFactors& z, bool add_mean_feature = true);

}  // namespace asd
