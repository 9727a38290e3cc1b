// include/asd/synthetic_data.hpp

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
#include <filesystem>
#include <vector>

#include "asd/tensor.hpp"

namespace asd {

/// Procedural images with D spatially localized binary attributes. Each
/// attribute has a distinct glyph and a fixed grid anchor; Gaussian jitter
/// of the anchor makes neighbouring attributes share pixels across samples.
struct GeneratorConfig {
  std::size_t image_size = 32;
  std::size_t num_attributes = 6;
  double glyph_radius = 4.0;
  double jitter = 1.5;
  double presence_prob = 0.5;
  double noise_std = 0.05;
  std::size_t channels = 1;

  void validate() const;
};

using Mask = std::vector<std::uint8_t>;  // image_size * image_size, row-major, 0/1

struct SyntheticSample {
  Tensor image;   // [S, S, channels], values in [0, 1]
  Tensor labels;  // [D], 0/1
  std::vector<Mask> masks;  // D masks; all-zero when the attribute is absent
};

// Anchor (x, y) of attribute k in pixel coordinates.
std::pair<double, double> attribute_anchor(const GeneratorConfig& config, std::size_t k);

// Pixels covered by glyph k drawn at its anchor with no jitter.
Mask glyph_stencil(const GeneratorConfig& config, std::size_t k);

// Fully determined by (seed, index, config).
SyntheticSample generate(std::uint64_t seed, std::uint64_t index, const GeneratorConfig& config);

// Samples 0..n-1. By convention train/val/test use seed, seed+1, seed+2.
std::vector<SyntheticSample> make_split(std::uint64_t seed, std::size_t n,
                                        const GeneratorConfig& config);

// Mirror image and masks left-right; labels are unchanged.
SyntheticSample flip_horizontal(const SyntheticSample& sample);

bool mask_empty(const Mask& mask);

// Shard archive with stacked `images` [n,S,S,ch], `labels` [n,D], `masks` [n,D,S,S].
void save_shard(const std::filesystem::path& path, const std::vector<SyntheticSample>& samples);
std::vector<SyntheticSample> load_shard(const std::filesystem::path& path);

}  // namespace asd
