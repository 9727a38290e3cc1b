// src/asdt_io.cpp

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

#include "asd/asdt_io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

#include "asd/errors.hpp"

namespace asd {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'D', 'T'};
constexpr std::size_t kMaxRank = 16;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t& offset)
      : bytes_(bytes), offset_(offset) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - std::min(offset_, bytes_.size()) < n) {
      throw FormatError(std::string("truncated ASDT data while reading ") + what, offset_);
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[offset_++];
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[offset_ + i]) << (8 * i);
    offset_ += 4;
    return v;
  }

  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[offset_ + i]) << (8 * i);
    offset_ += 8;
    return v;
  }

  void magic() {
    need(4, "magic");
    if (!std::equal(kMagic, kMagic + 4, bytes_.begin() + static_cast<std::ptrdiff_t>(offset_))) {
      throw FormatError("bad magic, expected 'ASDT'", offset_);
    }
    offset_ += 4;
  }

  void version() {
    const auto at = offset_;
    const auto v = u8("version");
    if (v != kAsdtVersion) {
      throw FormatError("unsupported ASDT version " + std::to_string(v), at);
    }
  }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(offset_, n);
    offset_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t& offset_;
};

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kAsdtVersion);
  out.push_back(kDtypeF64);
  out.push_back(static_cast<std::uint8_t>(t.ndim()));
  for (auto d : t.shape()) put_u64(out, d);
  out.reserve(out.size() + 8 * t.numel());
  for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  Reader r(bytes, offset);
  r.magic();
  r.version();
  const auto dtype_at = r.offset();
  const auto dtype = r.u8("dtype");
  if (dtype != kDtypeF64) {
    throw FormatError("unsupported dtype " + std::to_string(dtype) + " (expected 1 = f64)",
                      dtype_at);
  }
  const auto ndim = r.u8("ndim");
  if (ndim > kMaxRank) throw FormatError("rank " + std::to_string(ndim) + " too large", offset - 1);
  Shape shape;
  std::uint64_t count = 1;
  for (std::uint8_t i = 0; i < ndim; ++i) {
    const auto dim_at = r.offset();
    const auto d = r.u64("dimension");
    if (d == 0) throw FormatError("zero dimension", dim_at);
    if (d > r.remaining() / 8 / count) throw FormatError("dimensions exceed payload", dim_at);
    count *= d;
    shape.push_back(static_cast<std::size_t>(d));
  }
  r.need(count * 8, "payload");
  std::vector<double> data(count);
  for (auto& v : data) v = std::bit_cast<double>(r.u64("payload"));
  return Tensor(std::move(shape), std::move(data));
}

std::vector<std::uint8_t> encode_archive(const NamedTensors& entries) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kAsdtVersion);
  out.push_back(kArchiveMarker);
  put_u64(out, entries.size());
  for (const auto& [name, tensor] : entries) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    const auto rec = encode_tensor(tensor);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

NamedTensors decode_archive(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  Reader r(bytes, offset);
  r.magic();
  r.version();
  const auto marker_at = r.offset();
  if (r.u8("archive marker") != kArchiveMarker) {
    throw FormatError("not an ASDT archive (marker byte is not 0)", marker_at);
  }
  const auto count = r.u64("entry count");
  NamedTensors entries;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.u32("name length");
    const auto name_bytes = r.take(len, "entry name");
    std::string name(name_bytes.begin(), name_bytes.end());
    entries.emplace_back(std::move(name), decode_tensor(bytes, offset));
  }
  if (offset != bytes.size()) throw FormatError("trailing bytes after last entry", offset);
  return entries;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  write_file_bytes(path, encode_tensor(t));
}

Tensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  std::size_t offset = 0;
  auto t = decode_tensor(bytes, offset);
  if (offset != bytes.size()) throw FormatError("trailing bytes after tensor", offset);
  return t;
}

void save_archive(const std::filesystem::path& path, const NamedTensors& entries) {
  write_file_bytes(path, encode_archive(entries));
}

NamedTensors load_archive(const std::filesystem::path& path) {
  return decode_archive(read_file_bytes(path));
}

const Tensor& find_entry(const NamedTensors& entries, const std::string& name) {
  for (const auto& [n, t] : entries) {
    if (n == name) return t;
  }
  throw FormatError("archive has no entry named '" + name + "'", 0);
}

}  // namespace asd
