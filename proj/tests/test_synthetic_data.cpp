// tests/test_synthetic_data.cpp

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

#include <cmath>
#include <filesystem>
#include <set>

#include "asd/errors.hpp"
#include "asd/synthetic_data.hpp"
#include "test_util.hpp"

using namespace asd;

TEST_CASE("generate is deterministic per (seed, index)") {
  GeneratorConfig cfg;
  const auto a = generate(5, 17, cfg);
  const auto b = generate(5, 17, cfg);
  CHECK(testing::to_vec(a.image) == testing::to_vec(b.image));
  CHECK(testing::to_vec(a.labels) == testing::to_vec(b.labels));
  CHECK(a.masks == b.masks);
  CHECK(testing::to_vec(generate(5, 18, cfg).image) != testing::to_vec(a.image));
  CHECK(testing::to_vec(generate(6, 17, cfg).image) != testing::to_vec(a.image));
}

TEST_CASE("sample shapes, ranges and mask/label consistency") {
  GeneratorConfig cfg;
  cfg.channels = 2;
  for (const auto& s : make_split(3, 200, cfg)) {
    CHECK(s.image.shape() == Shape{32, 32, 2});
    CHECK(s.labels.shape() == Shape{6});
    REQUIRE(s.masks.size() == 6);
    for (double v : s.image.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(s.masks[k].size() == 32u * 32u);
      CHECK((s.labels[k] == 1.0) == !mask_empty(s.masks[k]));
    }
  }
}

TEST_CASE("presence_prob = 0 gives a pure noise field") {
  GeneratorConfig cfg;
  cfg.presence_prob = 0.0;
  const auto s = generate(1, 0, cfg);
  for (double v : s.labels.data()) CHECK(v == 0.0);
  for (const auto& m : s.masks) CHECK(mask_empty(m));
  double mean = 0.0;
  for (double v : s.image.data()) mean += v;
  mean /= static_cast<double>(s.image.numel());
  // Clamped zero-mean noise: E[max(0, N(0, 0.05))] = 0.05 / sqrt(2 pi).
  CHECK(mean == doctest::Approx(0.05 / std::sqrt(2 * 3.141592653589793)).epsilon(0.1));

  cfg.noise_std = 0.0;
  const auto silent = generate(1, 0, cfg);
  for (double v : silent.image.data()) CHECK(v == 0.0);
}

TEST_CASE("degenerate config reproduces the fixed stencils") {
  GeneratorConfig cfg;
  cfg.presence_prob = 1.0;
  cfg.jitter = 0.0;
  cfg.noise_std = 0.0;
  const auto s = generate(9, 4, cfg);
  for (std::size_t k = 0; k < cfg.num_attributes; ++k) {
    CHECK(s.masks[k] == glyph_stencil(cfg, k));
    CHECK(s.labels[k] == 1.0);
  }
}

TEST_CASE("glyphs and anchors are distinct per attribute") {
  GeneratorConfig cfg;
  std::set<Mask> shapes;
  std::set<std::pair<double, double>> anchors;
  for (std::size_t k = 0; k < cfg.num_attributes; ++k) {
    anchors.insert(attribute_anchor(cfg, k));
    // Re-centre each stencil on a common anchor to compare shapes alone.
    const auto stencil = glyph_stencil(cfg, k);
    const auto [ax, ay] = attribute_anchor(cfg, k);
    Mask centred(32 * 32, 0);
    const int ox = 16 - static_cast<int>(ax), oy = 16 - static_cast<int>(ay);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (stencil[y * 32 + x] && y + oy >= 0 && y + oy < 32 && x + ox >= 0 && x + ox < 32)
          centred[(y + oy) * 32 + (x + ox)] = 1;
    CHECK(!mask_empty(stencil));
    shapes.insert(centred);
  }
  CHECK(anchors.size() == cfg.num_attributes);
  CHECK(shapes.size() == cfg.num_attributes);
}

TEST_CASE("make_split samples differ pairwise") {
  GeneratorConfig cfg;
  const auto split = make_split(2, 3, cfg);
  REQUIRE(split.size() == 3);
  CHECK(testing::to_vec(split[0].image) != testing::to_vec(split[1].image));
  CHECK(testing::to_vec(split[1].image) != testing::to_vec(split[2].image));
  CHECK(testing::to_vec(split[0].image) != testing::to_vec(split[2].image));
  CHECK_THROWS_AS(make_split(2, 0, cfg), DomainError);
}

TEST_CASE("positive rate and attribute independence over 10^4 samples") {
  GeneratorConfig cfg;
  const std::size_t n = 10000, d = cfg.num_attributes;
  std::vector<std::vector<double>> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = testing::to_vec(generate(11, i, cfg).labels);
  std::vector<double> mean(d, 0.0);
  for (const auto& row : y)
    for (std::size_t k = 0; k < d; ++k) mean[k] += row[k] / static_cast<double>(n);
  for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(mean[k] - cfg.presence_prob) <= 0.02);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      double cov = 0.0, va = 0.0, vb = 0.0;
      for (const auto& row : y) {
        cov += (row[a] - mean[a]) * (row[b] - mean[b]);
        va += (row[a] - mean[a]) * (row[a] - mean[a]);
        vb += (row[b] - mean[b]) * (row[b] - mean[b]);
      }
      CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.05);
    }
  }
}

TEST_CASE("jittered masks of different attributes overlap somewhere in 1000 samples") {
  GeneratorConfig cfg;
  std::vector<std::vector<std::uint8_t>> reach(cfg.num_attributes, Mask(32 * 32, 0));
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto s = generate(13, i, cfg);
    for (std::size_t k = 0; k < cfg.num_attributes; ++k)
      for (std::size_t p = 0; p < s.masks[k].size(); ++p) reach[k][p] |= s.masks[k][p];
  }
  bool shared = false;
  for (std::size_t p = 0; p < 32 * 32 && !shared; ++p) {
    int owners = 0;
    for (const auto& r : reach) owners += r[p];
    shared = owners >= 2;
  }
  CHECK(shared);
}

TEST_CASE("flip_horizontal mirrors image and masks and keeps labels") {
  GeneratorConfig cfg;
  const auto s = generate(4, 2, cfg);
  const auto f = flip_horizontal(s);
  CHECK(testing::to_vec(f.labels) == testing::to_vec(s.labels));
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) {
      CHECK(f.image[y * 32 + x] == s.image[y * 32 + 31 - x]);
      for (std::size_t k = 0; k < 6; ++k) CHECK(f.masks[k][y * 32 + x] == s.masks[k][y * 32 + 31 - x]);
    }
  for (std::size_t k = 0; k < 6; ++k) CHECK((f.labels[k] == 1.0) == !mask_empty(f.masks[k]));
  const auto back = flip_horizontal(f);
  CHECK(testing::to_vec(back.image) == testing::to_vec(s.image));
  CHECK(back.masks == s.masks);
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  cfg.jitter = 8.0;  // image_size / 4
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.presence_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.num_attributes = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("shard round trip") {
  GeneratorConfig cfg;
  cfg.num_attributes = 4;
  const auto split = make_split(8, 5, cfg);
  const auto path = std::filesystem::temp_directory_path() / "asd_test_shard.asdt";
  save_shard(path, split);
  const auto loaded = load_shard(path);
  std::filesystem::remove(path);
  REQUIRE(loaded.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(testing::to_vec(loaded[i].image) == testing::to_vec(split[i].image));
    CHECK(testing::to_vec(loaded[i].labels) == testing::to_vec(split[i].labels));
    CHECK(loaded[i].masks == split[i].masks);
  }
}
