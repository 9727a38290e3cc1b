// tests/test_heatmap.cpp

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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>

#include "asd/aem.hpp"
#include "asd/errors.hpp"
#include "asd/heatmap.hpp"
#include "pgm_reader.hpp"
#include "test_util.hpp"

using namespace asd;

TEST_CASE("rearrange_assignment indexing and round trip") {
  const auto a = Tensor::matrix({{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}, {0.4, 0.6}});
  const auto stack = rearrange_assignment(a, 2, 2);
  CHECK(stack.shape() == Shape{2, 2, 2});
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t w = 0; w < 2; ++w)
      for (std::size_t j = 0; j < 2; ++j) CHECK(stack[(h * 2 + w) * 2 + j] == a.at(h * 2 + w, j));
  const auto back = flatten_feature({stack, 2, 2, 2});
  CHECK(testing::to_vec(back) == testing::to_vec(a));
  CHECK(testing::to_vec(heatmap_channel(stack, 1)) == std::vector<double>{0.9, 0.8, 0.7, 0.6});
  CHECK_THROWS_AS(rearrange_assignment(a, 3, 2), DimensionError);
  CHECK_THROWS_AS(heatmap_channel(stack, 2), DimensionError);
}

TEST_CASE("heatmap channels sum to one per location") {
  Rng rng(41);
  const FeatureMap f{testing::random_tensor(rng, {4, 4, 3}), 4, 4, 3};
  const LatentFactors z{testing::random_tensor(rng, {5, 3}), true};
  const auto stack = rearrange_assignment(aem_forward(f, z).assignment, 4, 4);
  for (std::size_t i = 0; i < 16; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += stack[i * 5 + j];
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
}

TEST_CASE("quantization follows min-max scaling with round-half-up") {
  CHECK(quantize_heatmap(Tensor::matrix({{0, 1}, {0.5, 0.25}})) == std::vector<std::uint8_t>{0, 255, 128, 64});
  CHECK(quantize_heatmap(Tensor::full({3, 3}, 0.42)) == std::vector<std::uint8_t>(9, 0));
  CHECK(quantize_heatmap(Tensor::matrix({{-2, 2}})) == std::vector<std::uint8_t>{0, 255});
  CHECK_THROWS_AS(quantize_heatmap(Tensor::matrix({{0, std::nan("")}})), DomainError);
}

TEST_CASE("PGM output parses with the expected geometry") {
  const auto bytes = encode_heatmap_pgm(Tensor::matrix({{0, 1}, {0.5, 0.25}}));
  const auto img = testing::parse_pgm(bytes);
  REQUIRE(img.has_value());
  CHECK(img->width == 16);
  CHECK(img->height == 16);
  CHECK(img->maxval == 255);
  CHECK(img->pixels[0] == 0);
  CHECK(img->pixels[15] == 255);
  CHECK(img->pixels[8 * 16 + 7] == 128);
  CHECK(img->pixels[15 * 16 + 15] == 64);

  const auto wide = testing::parse_pgm(encode_heatmap_pgm(Tensor::zeros({2, 3}), 2));
  REQUIRE(wide.has_value());
  CHECK(wide->width == 6);
  CHECK(wide->height == 4);
  CHECK(std::all_of(wide->pixels.begin(), wide->pixels.end(), [](auto p) { return p == 0; }));

  const auto path = std::filesystem::temp_directory_path() / "asd_test_map.pgm";
  write_heatmap_pgm(Tensor::matrix({{0, 1}, {0.5, 0.25}}), path);
  const auto from_file = testing::read_pgm(path.string());
  std::filesystem::remove(path);
  REQUIRE(from_file.has_value());
  CHECK(from_file->pixels == img->pixels);
  CHECK_THROWS_AS(write_heatmap_pgm(Tensor::zeros({2, 2}), "/nonexistent-dir/x.pgm"), IoError);
}

TEST_CASE("downsample_mask is a block max") {
  Mask m(16, 0);
  m[0 * 4 + 1] = 1;  // block (0,0)
  m[3 * 4 + 3] = 1;  // block (1,1)
  CHECK(downsample_mask(m, 4, 2, 2) == Mask{1, 0, 0, 1});
  CHECK_THROWS_AS(downsample_mask(m, 4, 3, 3), DimensionError);
}

TEST_CASE("quantile keep count") {
  CHECK(quantile_keep_count(64, 0.8) == 13);  // 12.8 rounds up
  CHECK(quantile_keep_count(10, 0.75) == 3);  // 2.5 rounds half up
  CHECK(quantile_keep_count(4, 0.99) == 1);
  CHECK_THROWS_AS(quantile_keep_count(4, 1.0), ContractError);
}

TEST_CASE("localization score edge cases") {
  // 4x4 heatmap over a 4x4 mask grid; q = 0.75 keeps 4 cells.
  Mask mask(16, 0);
  for (std::size_t i : {0, 1, 4, 5}) mask[i] = 1;
  std::vector<double> exact(16, 0.0), disjoint(16, 0.0);
  for (std::size_t i : {0, 1, 4, 5}) exact[i] = 1.0;
  for (std::size_t i : {10, 11, 14, 15}) disjoint[i] = 1.0;
  std::vector<double> stack_data;
  for (std::size_t i = 0; i < 16; ++i) {
    stack_data.push_back(exact[i]);
    stack_data.push_back(disjoint[i]);
    stack_data.push_back(0.5);
  }
  const Tensor stack({4, 4, 3}, stack_data);
  const auto scores = localization_score(stack, {mask, mask, Mask(16, 0)}, 4, 0.75);
  REQUIRE(scores.size() == 3);
  CHECK(*scores[0] == 1.0);
  CHECK(*scores[1] == 0.0);
  CHECK(!scores[2].has_value());
}

TEST_CASE("localization score matches a set-arithmetic oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t h = 4, w = 4, k = 3, s = 8;
    const auto stack = testing::random_tensor(rng, {h, w, k}, 0, 1);
    std::vector<Mask> masks(k, Mask(s * s, 0));
    for (auto& m : masks)
      for (auto& v : m) v = rng.bernoulli(0.05);
    const double q = 0.7;
    const auto scores = localization_score(stack, masks, s, q);
    for (std::size_t j = 0; j < k; ++j) {
      std::set<std::size_t> truth;
      for (std::size_t y = 0; y < s; ++y)
        for (std::size_t x = 0; x < s; ++x)
          if (masks[j][y * s + x]) truth.insert((y / 2) * w + x / 2);
      if (truth.empty()) {
        CHECK(!scores[j].has_value());
        continue;
      }
      std::vector<std::size_t> order(h * w);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](auto a, auto b) { return stack[a * k + j] > stack[b * k + j]; });
      const std::size_t keep = static_cast<std::size_t>(std::floor(0.3 * 16 + 0.5));
      std::set<std::size_t> hot(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
      std::size_t inter = 0;
      for (auto c : hot) inter += truth.count(c);
      const double expected = static_cast<double>(inter) /
                              static_cast<double>(hot.size() + truth.size() - inter);
      REQUIRE(scores[j].has_value());
      CHECK(*scores[j] == doctest::Approx(expected).epsilon(1e-15));
      CHECK(*scores[j] >= 0.0);
      CHECK(*scores[j] <= 1.0);
    }
  }
}

TEST_CASE("localization score grows with nested overlap") {
  Mask mask(16, 0);
  for (std::size_t i = 0; i < 4; ++i) mask[i] = 1;  // top row
  double previous = -1.0;
  for (std::size_t overlap = 0; overlap <= 4; ++overlap) {
    std::vector<double> map(16, 0.0);
    for (std::size_t i = 0; i < overlap; ++i) map[i] = 1.0;
    for (std::size_t i = overlap; i < 4; ++i) map[15 - i] = 1.0;
    const auto score = *localization_score(Tensor({4, 4, 1}, map), {mask}, 4, 0.75)[0];
    CHECK(score > previous);
    previous = score;
  }
}
