// src/heatmap.cpp

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

#include "asd/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asd/asdt_io.hpp"
#include "asd/errors.hpp"

namespace asd {

Tensor rearrange_assignment(const Tensor& assignment, std::size_t height, std::size_t width) {
  if (assignment.ndim() != 2 || assignment.dim(0) != height * width) {
    throw DimensionError("rearrange_assignment: " + shape_str(assignment.shape()) +
                         " does not have " + std::to_string(height) + "x" +
                         std::to_string(width) + " rows");
  }
  // Row-major [H*W, K] and [H, W, K] share one memory layout.
  const auto k = assignment.dim(1);
  return Tensor({height, width, k},
                std::vector<double>(assignment.data().begin(), assignment.data().end()));
}

Tensor heatmap_channel(const Tensor& stack, std::size_t j) {
  if (stack.ndim() != 3 || j >= stack.dim(2)) {
    throw DimensionError("heatmap_channel: channel " + std::to_string(j) + " of " +
                         shape_str(stack.shape()));
  }
  const auto h = stack.dim(0), w = stack.dim(1), k = stack.dim(2);
  std::vector<double> out(h * w);
  for (std::size_t i = 0; i < h * w; ++i) out[i] = stack.data()[i * k + j];
  return Tensor({h, w}, std::move(out));
}

std::vector<std::uint8_t> quantize_heatmap(const Tensor& map) {
  const auto values = map.data();
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("quantize_heatmap: non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<std::uint8_t> out(values.size(), 0);
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double scaled = (values[i] - *lo) / range * 255.0;
    out[i] = static_cast<std::uint8_t>(std::min(255.0, std::floor(scaled + 0.5)));
  }
  return out;
}

std::vector<std::uint8_t> encode_heatmap_pgm(const Tensor& map, std::size_t upscale) {
  if (map.ndim() != 2) throw DimensionError("heatmap must be 2-D, got " + shape_str(map.shape()));
  if (upscale == 0) throw ContractError("heatmap upscale must be positive");
  const auto h = map.dim(0), w = map.dim(1);
  const auto pixels = quantize_heatmap(map);
  const std::string header =
      "P5\n" + std::to_string(w * upscale) + " " + std::to_string(h * upscale) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + h * w * upscale * upscale);
  for (std::size_t y = 0; y < h * upscale; ++y)
    for (std::size_t x = 0; x < w * upscale; ++x)
      out.push_back(pixels[(y / upscale) * w + x / upscale]);
  return out;
}

void write_heatmap_pgm(const Tensor& map, const std::filesystem::path& path, std::size_t upscale) {
  write_file_bytes(path, encode_heatmap_pgm(map, upscale));
}

Mask downsample_mask(const Mask& mask, std::size_t size, std::size_t height, std::size_t width) {
  if (mask.size() != size * size || size % height != 0 || size % width != 0) {
    throw DimensionError("downsample_mask: " + std::to_string(size) + "x" +
                         std::to_string(size) + " mask cannot be block-reduced to " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  const auto by = size / height, bx = size / width;
  Mask out(height * width, 0);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x)
      if (mask[y * size + x]) out[(y / by) * width + x / bx] = 1;
  return out;
}

std::size_t quantile_keep_count(std::size_t locations, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ContractError("localization quantile must lie in (0, 1)");
  const auto keep = static_cast<std::size_t>(
      std::floor((1.0 - q) * static_cast<double>(locations) + 0.5));
  return std::clamp<std::size_t>(keep, 1, locations);
}

std::vector<std::optional<double>> localization_score(const Tensor& stack,
                                                      const std::vector<Mask>& masks,
                                                      std::size_t mask_size, double q) {
  if (stack.ndim() != 3 || stack.dim(2) < masks.size()) {
    throw DimensionError("localization_score: stack " + shape_str(stack.shape()) +
                         " has fewer channels than " + std::to_string(masks.size()) + " masks");
  }
  const auto h = stack.dim(0), w = stack.dim(1);
  const auto keep = quantile_keep_count(h * w, q);
  std::vector<std::optional<double>> scores;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const Mask cells = downsample_mask(masks[j], mask_size, h, w);
    if (mask_empty(cells)) {
      scores.emplace_back(std::nullopt);
      continue;
    }
    const Tensor map = heatmap_channel(stack, j);
    std::vector<double> sorted(map.data().begin(), map.data().end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                     sorted.end(), std::greater<>());
    const double threshold = sorted[keep - 1];
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < h * w; ++i) {
      const bool hot = map.data()[i] >= threshold;
      const bool truth = cells[i] != 0;
      inter += hot && truth;
      uni += hot || truth;
    }
    scores.emplace_back(static_cast<double>(inter) / static_cast<double>(uni));
  }
  return scores;
}

}  // namespace asd
