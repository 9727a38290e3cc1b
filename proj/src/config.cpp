// src/config.cpp

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

#include "asd/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "asd/errors.hpp"

namespace asd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("invalid number '" + v + "'");
  return out;
}

double parse_real(const std::string& v) {
  // from_chars for double is not available on every libstdc++ we target.
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid real '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("invalid real '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("invalid boolean '" + v + "' (use true/false)");
}

std::vector<std::size_t> parse_list(const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<std::size_t>(trim(item)));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"image_size", [](auto& c, auto& v) { c.generator.image_size = parse_number<std::size_t>(v); }},
      {"num_attributes", [](auto& c, auto& v) { c.generator.num_attributes = parse_number<std::size_t>(v); }},
      {"glyph_radius", [](auto& c, auto& v) { c.generator.glyph_radius = parse_real(v); }},
      {"jitter", [](auto& c, auto& v) { c.generator.jitter = parse_real(v); }},
      {"presence_prob", [](auto& c, auto& v) { c.generator.presence_prob = parse_real(v); }},
      {"noise_std", [](auto& c, auto& v) { c.generator.noise_std = parse_real(v); }},
      {"channels", [](auto& c, auto& v) {
         c.generator.channels = parse_number<std::size_t>(v);
         c.extractor.in_channels = c.generator.channels;
       }},
      {"train_size", [](auto& c, auto& v) { c.train_size = parse_number<std::size_t>(v); }},
      {"val_size", [](auto& c, auto& v) { c.val_size = parse_number<std::size_t>(v); }},
      {"data_seed", [](auto& c, auto& v) { c.data_seed = parse_number<std::uint64_t>(v); }},
      {"stage_channels", [](auto& c, auto& v) { c.extractor.stage_channels = parse_list(v); }},
      {"pool_factors", [](auto& c, auto& v) { c.extractor.pool_factors = parse_list(v); }},
      {"kernel_size", [](auto& c, auto& v) { c.extractor.kernel_size = parse_number<std::size_t>(v); }},
      {"epochs", [](auto& c, auto& v) { c.train.epochs = parse_number<std::size_t>(v); }},
      {"lr", [](auto& c, auto& v) { c.train.lr = parse_real(v); }},
      {"lr_decay", [](auto& c, auto& v) { c.train.lr_decay = parse_real(v); }},
      {"lr_decay_every", [](auto& c, auto& v) { c.train.lr_decay_every = parse_number<std::size_t>(v); }},
      {"weight_decay", [](auto& c, auto& v) { c.train.weight_decay = parse_real(v); }},
      {"gamma", [](auto& c, auto& v) { c.train.gamma = parse_real(v); }},
      {"batch_size", [](auto& c, auto& v) { c.train.batch_size = parse_number<std::size_t>(v); }},
      {"seed", [](auto& c, auto& v) { c.train.seed = parse_number<std::uint64_t>(v); }},
      {"use_asd", [](auto& c, auto& v) { c.train.use_asd = parse_bool(v); }},
      {"use_noise_factor", [](auto& c, auto& v) { c.train.use_noise_factor = parse_bool(v); }},
      {"use_mean_feature", [](auto& c, auto& v) { c.train.use_mean_feature = parse_bool(v); }},
      {"use_cmm", [](auto& c, auto& v) { c.train.use_cmm = parse_bool(v); }},
      {"flip_augment", [](auto& c, auto& v) { c.train.flip_augment = parse_bool(v); }},
  };
  return table;
}

std::string b(bool v) { return v ? "true" : "false"; }

std::string list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  generator.validate();
  extractor.validate();
  train.validate();
  if (train_size == 0 || val_size == 0) throw ConfigError("train_size and val_size must be positive");
  if (extractor.in_channels != generator.channels) {
    throw ConfigError("extractor in_channels must equal generator channels");
  }
  if (generator.image_size % extractor.total_pool() != 0) {
    throw ConfigError("image_size " + std::to_string(generator.image_size) +
                      " must be divisible by the cumulative pool factor " +
                      std::to_string(extractor.total_pool()));
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value, got '" + line + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "image_size=" << c.generator.image_size << '\n'
     << "num_attributes=" << c.generator.num_attributes << '\n'
     << "glyph_radius=" << real(c.generator.glyph_radius) << '\n'
     << "jitter=" << real(c.generator.jitter) << '\n'
     << "presence_prob=" << real(c.generator.presence_prob) << '\n'
     << "noise_std=" << real(c.generator.noise_std) << '\n'
     << "channels=" << c.generator.channels << '\n'
     << "train_size=" << c.train_size << '\n'
     << "val_size=" << c.val_size << '\n'
     << "data_seed=" << c.data_seed << '\n'
     << "stage_channels=" << list(c.extractor.stage_channels) << '\n'
     << "pool_factors=" << list(c.extractor.pool_factors) << '\n'
     << "kernel_size=" << c.extractor.kernel_size << '\n'
     << "epochs=" << c.train.epochs << '\n'
     << "lr=" << real(c.train.lr) << '\n'
     << "lr_decay=" << real(c.train.lr_decay) << '\n'
     << "lr_decay_every=" << c.train.lr_decay_every << '\n'
     << "weight_decay=" << real(c.train.weight_decay) << '\n'
     << "gamma=" << real(c.train.gamma) << '\n'
     << "batch_size=" << c.train.batch_size << '\n'
     << "seed=" << c.train.seed << '\n'
     << "use_asd=" << b(c.train.use_asd) << '\n'
     << "use_noise_factor=" << b(c.train.use_noise_factor) << '\n'
     << "use_mean_feature=" << b(c.train.use_mean_feature) << '\n'
     << "use_cmm=" << b(c.train.use_cmm) << '\n'
     << "flip_augment=" << b(c.train.flip_augment) << '\n';
  return os.str();
}

std::vector<SyntheticSample> make_train_split(const ExperimentConfig& config) {
  return make_split(config.data_seed, config.train_size, config.generator);
}

std::vector<SyntheticSample> make_val_split(const ExperimentConfig& config) {
  return make_split(config.data_seed + 1, config.val_size, config.generator);
}

}  // namespace asd
