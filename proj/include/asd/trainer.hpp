// include/asd/trainer.hpp

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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "asd/aem.hpp"
#include "asd/classifier.hpp"
#include "asd/feature_extractor.hpp"
#include "asd/synthetic_data.hpp"

namespace asd {

/// Architecture of a model; stored alongside the weights in checkpoints.
struct ModelConfig {
  ExtractorConfig extractor;
  std::size_t num_attributes = 6;
  bool use_asd = true;
  bool use_noise_factor = true;
  bool use_mean_feature = true;

  std::size_t heads() const { return num_attributes + (use_noise_factor ? 1 : 0); }
  void validate() const;
};

struct Model {
  ModelConfig config;
  ExtractorWeights extractor;
  std::optional<LatentFactors> factors;  // absent for the pooled baseline
  ClassifierParams classifier;

  struct Output {
    Tensor probabilities;  // [heads]
    Tensor assignment;     // [M, factors]; undefined for the baseline
    FeatureMap features;
  };

  Output forward(const Tensor& image) const;
  std::vector<Tensor> parameters() const;
  // Per-parameter decoupled weight-decay flags, parallel to parameters():
  // kernels and probe weights decay, biases and latent factors do not.
  std::vector<bool> decay_mask() const;
  NamedTensors named_tensors() const;
};

Model init_model(const ModelConfig& config, std::uint64_t seed);

// Labels extended with the zero noise target when the model has a noise head.
Tensor training_targets(const Tensor& labels, const ModelConfig& config);

struct TrainConfig {
  std::size_t epochs = 80;
  double lr = 3e-4;
  double lr_decay = 0.1;
  std::size_t lr_decay_every = 20;
  double weight_decay = 5e-4;
  double gamma = 0.02;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  bool use_asd = true;
  bool use_noise_factor = true;
  bool use_mean_feature = true;
  bool use_cmm = true;
  bool flip_augment = true;

  void validate() const;
  double lr_at_epoch(std::size_t epoch) const;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
};

// Decoupled weight decay (p -= lr * wd_i * p) followed by a bias-corrected
// Adam update. Gradients are read from each parameter's grad buffer; a
// parameter with no gradient is treated as having a zero gradient.
void adam_step(std::span<Tensor> params, AdamState& state, double lr,
               std::span<const double> weight_decay, const AdamOptions& options = {});

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_acc = 0.0;
  double offdiag_mean = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
};

ModelConfig model_config_for(const TrainConfig& train, const ExtractorConfig& extractor,
                             std::size_t num_attributes);

TrainResult train(const TrainConfig& config, const ExtractorConfig& extractor,
                  const std::vector<SyntheticSample>& train_split,
                  const std::vector<SyntheticSample>& val_split,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

std::vector<Tensor> predict_all(const Model& model, const std::vector<SyntheticSample>& samples);
AccuracyReport evaluate(const Model& model, const std::vector<SyntheticSample>& samples);

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_checkpoint(const Model& model);
Model decode_checkpoint(std::span<const std::uint8_t> bytes);
// When expected_attributes is set, a checkpoint for a different D is rejected
// with a DimensionError naming both values.
Model load_checkpoint(const std::filesystem::path& path,
                      std::optional<std::size_t> expected_attributes = std::nullopt);

}  // namespace asd
