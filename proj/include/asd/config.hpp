// include/asd/config.hpp

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
#include <string>

#include "asd/feature_extractor.hpp"
#include "asd/synthetic_data.hpp"
#include "asd/trainer.hpp"

namespace asd {

/// Everything a CLI run needs: data generation, architecture and schedule.
struct ExperimentConfig {
  GeneratorConfig generator;
  ExtractorConfig extractor;
  TrainConfig train;
  std::size_t train_size = 2000;
  std::size_t val_size = 500;
  std::uint64_t data_seed = 1;

  void validate() const;
};

// Line-based `key=value`; `#` starts a comment; blank lines ignored.
// Unknown keys, duplicate keys, missing '=' and unparsable values raise a
// ConfigError that names the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string format_config(const ExperimentConfig& config);

// Train/val/test splits use data_seed, data_seed+1, data_seed+2.
std::vector<SyntheticSample> make_train_split(const ExperimentConfig& config);
std::vector<SyntheticSample> make_val_split(const ExperimentConfig& config);

}  // namespace asd
