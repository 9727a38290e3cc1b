// tests/pgm_reader.hpp

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

// Minimal standalone binary PGM (P5) parser used to validate writer output.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace asd::testing {

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 0;
  std::vector<std::uint8_t> pixels;
};

inline std::optional<PgmImage> parse_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto number = [&]() -> std::optional<unsigned long> {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) return std::nullopt;
    unsigned long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') return std::nullopt;
  pos = 2;
  const auto w = number(), h = number(), maxval = number();
  if (!w || !h || !maxval || *w == 0 || *h == 0 || *maxval == 0 || *maxval > 255) return std::nullopt;
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) return std::nullopt;
  ++pos;
  if (bytes.size() - pos != *w * *h) return std::nullopt;
  PgmImage img{*w, *h, static_cast<unsigned>(*maxval), {bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()}};
  for (auto p : img.pixels)
    if (p > img.maxval) return std::nullopt;
  return img;
}

inline std::optional<PgmImage> read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

}  // namespace asd::testing
