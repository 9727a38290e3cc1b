// src/synthetic_data.cpp

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

#include "asd/synthetic_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asd/asdt_io.hpp"
#include "asd/errors.hpp"
#include "asd/rng.hpp"

namespace asd {

namespace {

// Shape families cycle with period 6; bars additionally rotate by k*pi/D, so
// every attribute of a D <= 6 configuration has a unique shape.
enum class GlyphKind { kDisc, kRing, kBar, kCross, kSquareOutline, kBarAlt };

GlyphKind glyph_kind(std::size_t k) { return static_cast<GlyphKind>(k % 6); }

double glyph_intensity(const GeneratorConfig& config, std::size_t k) {
  const double span = config.num_attributes > 1 ? static_cast<double>(config.num_attributes - 1) : 1.0;
  return 1.0 - 0.4 * static_cast<double>(k) / span;
}

bool on_bar(double dx, double dy, double angle, double half_length) {
  const double along = dx * std::cos(angle) + dy * std::sin(angle);
  const double across = -dx * std::sin(angle) + dy * std::cos(angle);
  return std::abs(along) <= half_length && std::abs(across) <= 1.0;
}

bool covers(const GeneratorConfig& config, std::size_t k, double dx, double dy) {
  const double r = config.glyph_radius;
  const double angle =
      static_cast<double>(k) * std::numbers::pi / static_cast<double>(config.num_attributes);
  switch (glyph_kind(k)) {
    case GlyphKind::kDisc:
      return dx * dx + dy * dy <= r * r;
    case GlyphKind::kRing: {
      const double d = std::sqrt(dx * dx + dy * dy);
      return d <= r && d >= r - 1.5;
    }
    case GlyphKind::kBar:
    case GlyphKind::kBarAlt:
      return on_bar(dx, dy, angle, r);
    case GlyphKind::kCross:
      return on_bar(dx, dy, 0.0, r) || on_bar(dx, dy, 0.5 * std::numbers::pi, r);
    case GlyphKind::kSquareOutline: {
      const double edge = 0.8 * r;
      const double m = std::max(std::abs(dx), std::abs(dy));
      return m <= edge && m >= edge - 1.5;
    }
  }
  return false;
}

Mask render_mask(const GeneratorConfig& config, std::size_t k, double cx, double cy) {
  const auto s = config.image_size;
  Mask mask(s * s, 0);
  for (std::size_t y = 0; y < s; ++y) {
    for (std::size_t x = 0; x < s; ++x) {
      const double dx = static_cast<double>(x) + 0.5 - cx;
      const double dy = static_cast<double>(y) + 0.5 - cy;
      if (covers(config, k, dx, dy)) mask[y * s + x] = 1;
    }
  }
  return mask;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (image_size == 0) throw ConfigError("generator: image_size must be positive");
  if (num_attributes == 0) throw ConfigError("generator: num_attributes must be positive");
  if (channels == 0) throw ConfigError("generator: channels must be positive");
  if (!(glyph_radius > 0.0)) throw ConfigError("generator: glyph_radius must be positive");
  if (jitter < 0.0 || jitter >= static_cast<double>(image_size) / 4.0) {
    throw ConfigError("generator: jitter must lie in [0, image_size/4)");
  }
  if (presence_prob < 0.0 || presence_prob > 1.0) {
    throw ConfigError("generator: presence_prob must lie in [0, 1]");
  }
  if (noise_std < 0.0) throw ConfigError("generator: noise_std must be non-negative");
}

std::pair<double, double> attribute_anchor(const GeneratorConfig& config, std::size_t k) {
  const auto d = config.num_attributes;
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  const auto rows = (d + cols - 1) / cols;
  const double size = static_cast<double>(config.image_size);
  const double x = (static_cast<double>(k % cols) + 0.5) * size / static_cast<double>(cols);
  const double y = (static_cast<double>(k / cols) + 0.5) * size / static_cast<double>(rows);
  return {x, y};
}

Mask glyph_stencil(const GeneratorConfig& config, std::size_t k) {
  const auto [x, y] = attribute_anchor(config, k);
  return render_mask(config, k, x, y);
}

bool mask_empty(const Mask& mask) {
  return std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; });
}

SyntheticSample generate(std::uint64_t seed, std::uint64_t index, const GeneratorConfig& config) {
  config.validate();
  Rng rng(derive_seed(seed, index));
  const auto s = config.image_size;
  const auto d = config.num_attributes;
  const auto ch = config.channels;

  std::vector<double> canvas(s * s, 0.0);
  std::vector<double> labels(d, 0.0);
  std::vector<Mask> masks;
  masks.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    // Always consume the same number of draws per attribute so streams stay
    // aligned regardless of presence.
    const bool present = rng.bernoulli(config.presence_prob);
    const double jx = rng.normal() * config.jitter;
    const double jy = rng.normal() * config.jitter;
    if (!present) {
      masks.emplace_back(s * s, 0);
      continue;
    }
    const auto [ax, ay] = attribute_anchor(config, k);
    Mask mask = render_mask(config, k, ax + jx, ay + jy);
    const double intensity = glyph_intensity(config, k);
    for (std::size_t i = 0; i < s * s; ++i) {
      if (mask[i]) canvas[i] = std::max(canvas[i], intensity);
    }
    labels[k] = mask_empty(mask) ? 0.0 : 1.0;
    masks.push_back(std::move(mask));
  }

  std::vector<double> pixels(s * s * ch);
  for (std::size_t i = 0; i < s * s; ++i) {
    for (std::size_t c = 0; c < ch; ++c) {
      const double noisy = canvas[i] + config.noise_std * rng.normal();
      pixels[i * ch + c] = std::clamp(noisy, 0.0, 1.0);
    }
  }
  return {Tensor({s, s, ch}, std::move(pixels)), Tensor({d}, std::move(labels)), std::move(masks)};
}

std::vector<SyntheticSample> make_split(std::uint64_t seed, std::size_t n,
                                        const GeneratorConfig& config) {
  if (n == 0) throw DomainError("make_split: n must be at least 1");
  std::vector<SyntheticSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate(seed, i, config));
  return out;
}

SyntheticSample flip_horizontal(const SyntheticSample& sample) {
  const auto h = sample.image.dim(0), w = sample.image.dim(1), ch = sample.image.dim(2);
  const auto src = sample.image.data();
  std::vector<double> pixels(src.size());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < ch; ++c)
        pixels[(y * w + x) * ch + c] = src[(y * w + (w - 1 - x)) * ch + c];
  std::vector<Mask> masks;
  for (const auto& m : sample.masks) {
    Mask flipped(m.size());
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) flipped[y * w + x] = m[y * w + (w - 1 - x)];
    masks.push_back(std::move(flipped));
  }
  return {Tensor(sample.image.shape(), std::move(pixels)), sample.labels.detach(), std::move(masks)};
}

void save_shard(const std::filesystem::path& path, const std::vector<SyntheticSample>& samples) {
  if (samples.empty()) throw DomainError("save_shard: no samples");
  const auto& first = samples.front();
  const auto s = first.image.dim(0), ch = first.image.dim(2), d = first.labels.numel();
  std::vector<double> images, labels, masks;
  for (const auto& smp : samples) {
    if (smp.image.shape() != first.image.shape() || smp.labels.numel() != d) {
      throw DimensionError("save_shard: samples have inconsistent shapes");
    }
    images.insert(images.end(), smp.image.data().begin(), smp.image.data().end());
    labels.insert(labels.end(), smp.labels.data().begin(), smp.labels.data().end());
    for (const auto& m : smp.masks)
      for (auto v : m) masks.push_back(v);
  }
  const auto n = samples.size();
  save_archive(path, {{"images", Tensor({n, s, s, ch}, std::move(images))},
                      {"labels", Tensor({n, d}, std::move(labels))},
                      {"masks", Tensor({n, d, s, s}, std::move(masks))}});
}

std::vector<SyntheticSample> load_shard(const std::filesystem::path& path) {
  const auto entries = load_archive(path);
  const auto& images = find_entry(entries, "images");
  const auto& labels = find_entry(entries, "labels");
  const auto& masks = find_entry(entries, "masks");
  if (images.ndim() != 4 || labels.ndim() != 2 || masks.ndim() != 4 ||
      labels.dim(0) != images.dim(0) || masks.dim(0) != images.dim(0) ||
      masks.dim(1) != labels.dim(1) || masks.dim(2) != images.dim(1) ||
      masks.dim(3) != images.dim(2) || images.dim(1) != images.dim(2)) {
    throw DimensionError("load_shard: inconsistent shard shapes images " +
                         shape_str(images.shape()) + ", labels " + shape_str(labels.shape()) +
                         ", masks " + shape_str(masks.shape()));
  }
  const auto n = images.dim(0), s = images.dim(1), ch = images.dim(3), d = labels.dim(1);
  std::vector<SyntheticSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto img = images.data().subspan(i * s * s * ch, s * s * ch);
    const auto lab = labels.data().subspan(i * d, d);
    SyntheticSample smp{Tensor({s, s, ch}, {img.begin(), img.end()}),
                        Tensor({d}, {lab.begin(), lab.end()}),
                        {}};
    for (std::size_t k = 0; k < d; ++k) {
      const auto m = masks.data().subspan((i * d + k) * s * s, s * s);
      Mask mask(s * s);
      for (std::size_t p = 0; p < s * s; ++p) mask[p] = m[p] != 0.0 ? 1 : 0;
      smp.masks.push_back(std::move(mask));
    }
    out.push_back(std::move(smp));
  }
  return out;
}

}  // namespace asd
