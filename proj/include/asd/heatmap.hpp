// include/asd/heatmap.hpp

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
#include <optional>
#include <vector>

#include "asd/synthetic_data.hpp"
#include "asd/tensor.hpp"

namespace asd {

// A [H*W, K] -> maps [H, W, K] with maps[h][w][j] = A[h*W + w][j].
Tensor rearrange_assignment(const Tensor& assignment, std::size_t height, std::size_t width);

// Channel j of an [H, W, K] stack as an [H, W] map.
Tensor heatmap_channel(const Tensor& stack, std::size_t j);

// Per-map min-max scaling to 0..255 with round-half-up; a constant map
// becomes all zeros. Returns H*W bytes, row-major.
std::vector<std::uint8_t> quantize_heatmap(const Tensor& map);

// Binary PGM (P5, maxval 255), nearest-neighbour upscaled by `upscale`.
std::vector<std::uint8_t> encode_heatmap_pgm(const Tensor& map, std::size_t upscale = 8);
void write_heatmap_pgm(const Tensor& map, const std::filesystem::path& path,
                       std::size_t upscale = 8);

// Block-max downsampling of an S x S mask to H x W (S divisible by H and W).
Mask downsample_mask(const Mask& mask, std::size_t size, std::size_t height, std::size_t width);

// Number of locations kept by the q-quantile binarization: round((1-q) * M),
// at least one.
std::size_t quantile_keep_count(std::size_t locations, double q);

/// Per-attribute IoU between the top (1-q) fraction of heatmap j (ties at the
/// threshold included) and mask j downsampled to the heatmap grid. Only the
/// first masks.size() channels are scored; attributes whose mask is empty are
/// returned as nullopt.
std::vector<std::optional<double>> localization_score(const Tensor& stack,
                                                      const std::vector<Mask>& masks,
                                                      std::size_t mask_size, double q = 0.8);

}  // namespace asd
