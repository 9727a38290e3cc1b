// include/asd/asdt_io.hpp

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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asd/tensor.hpp"

namespace asd {

// Binary tensor record:
//   "ASDT" | u8 version=1 | u8 dtype (1 = f64) | u8 ndim | ndim x u64 dims |
//   row-major f64 payload
// All integers and payload values are little-endian.
//
// Named archive (checkpoints, dataset shards):
//   "ASDT" | u8 version=1 | u8 0 (archive marker) | u64 entry count |
//   per entry: u32 name length | name bytes | tensor record

inline constexpr std::uint8_t kAsdtVersion = 1;
inline constexpr std::uint8_t kDtypeF64 = 1;
inline constexpr std::uint8_t kArchiveMarker = 0;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
// Parses one tensor record starting at `offset`, advancing it past the record.
Tensor decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset);

std::vector<std::uint8_t> encode_archive(const NamedTensors& entries);
NamedTensors decode_archive(std::span<const std::uint8_t> bytes);

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);
void save_archive(const std::filesystem::path& path, const NamedTensors& entries);
NamedTensors load_archive(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Lookup by name; throws FormatError naming the missing entry.
const Tensor& find_entry(const NamedTensors& entries, const std::string& name);

}  // namespace asd
