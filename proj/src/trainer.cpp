// src/trainer.cpp

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

#include "asd/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "asd/asdt_io.hpp"
#include "asd/cmm.hpp"
#include "asd/errors.hpp"
#include "asd/rng.hpp"

namespace asd {

namespace {

constexpr double kMetaVersion = 1.0;

// Seed streams derived from TrainConfig::seed.
enum SeedStream : std::uint64_t {
  kExtractorStream = 10,
  kFactorStream = 11,
  kClassifierStream = 12,
  kOrderStream = 20,
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Tensor encode_model_config(const ModelConfig& c) {
  std::vector<double> v{kMetaVersion,
                        static_cast<double>(c.num_attributes),
                        static_cast<double>(c.extractor.in_channels),
                        static_cast<double>(c.extractor.kernel_size),
                        c.use_asd ? 1.0 : 0.0,
                        c.use_noise_factor ? 1.0 : 0.0,
                        c.use_mean_feature ? 1.0 : 0.0,
                        static_cast<double>(c.extractor.stage_channels.size())};
  for (auto ch : c.extractor.stage_channels) v.push_back(static_cast<double>(ch));
  for (auto p : c.extractor.pool_factors) v.push_back(static_cast<double>(p));
  const auto n = v.size();
  return Tensor({n}, std::move(v));
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw FormatError(std::string("checkpoint metadata: invalid ") + what, 0);
  }
  return static_cast<std::size_t>(v);
}

ModelConfig decode_model_config(const Tensor& meta) {
  const auto d = meta.data();
  if (meta.ndim() != 1 || d.size() < 8) throw FormatError("checkpoint metadata too short", 0);
  if (d[0] != kMetaVersion) throw FormatError("unsupported checkpoint metadata version", 0);
  ModelConfig c;
  c.num_attributes = as_count(d[1], "num_attributes");
  c.extractor.in_channels = as_count(d[2], "in_channels");
  c.extractor.kernel_size = as_count(d[3], "kernel_size");
  c.use_asd = d[4] != 0.0;
  c.use_noise_factor = d[5] != 0.0;
  c.use_mean_feature = d[6] != 0.0;
  const auto stages = as_count(d[7], "stage count");
  if (d.size() != 8 + 2 * stages) throw FormatError("checkpoint metadata length mismatch", 0);
  c.extractor.stage_channels.clear();
  c.extractor.pool_factors.clear();
  for (std::size_t i = 0; i < stages; ++i) {
    c.extractor.stage_channels.push_back(as_count(d[8 + i], "stage channels"));
    c.extractor.pool_factors.push_back(as_count(d[8 + stages + i], "pool factor"));
  }
  c.validate();
  return c;
}

}  // namespace

void ModelConfig::validate() const {
  extractor.validate();
  if (num_attributes == 0) throw ConfigError("model: num_attributes must be positive");
}

Model::Output Model::forward(const Tensor& image) const {
  Output out;
  out.features = extract(image, config.extractor, extractor);
  Tensor embeddings;
  if (config.use_asd) {
    auto aem = aem_forward(out.features, *factors, config.use_mean_feature);
    embeddings = std::move(aem.embeddings);
    out.assignment = std::move(aem.assignment);
  } else {
    // Pooled baseline: one global feature shared by every head, which makes
    // the diagonal probes a dense linear layer over the pooled vector.
    embeddings = repeat_rows(mean_rows(flatten_feature(out.features)), config.heads());
  }
  out.probabilities = predict(embeddings, classifier);
  return out;
}

std::vector<Tensor> Model::parameters() const {
  auto params = extractor.parameters();
  if (factors) params.push_back(factors->z);
  params.push_back(classifier.w);
  params.push_back(classifier.b);
  return params;
}

std::vector<bool> Model::decay_mask() const {
  std::vector<bool> mask;
  for (std::size_t i = 0; i < extractor.stages.size(); ++i) {
    mask.push_back(true);   // kernel
    mask.push_back(false);  // bias
  }
  if (factors) mask.push_back(false);
  mask.push_back(true);
  mask.push_back(false);
  return mask;
}

NamedTensors Model::named_tensors() const {
  NamedTensors out;
  out.emplace_back("meta.model", encode_model_config(config));
  extractor.append_named(out);
  if (factors) out.emplace_back("aem.z", factors->z);
  out.emplace_back("cls.w", classifier.w);
  out.emplace_back("cls.b", classifier.b);
  return out;
}

Model init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Model model;
  model.config = config;
  model.extractor = init_extractor(config.extractor, derive_seed(seed, kExtractorStream));
  const auto channels = config.extractor.out_channels();
  if (config.use_asd) {
    model.factors = init_latent_factors(config.num_attributes, channels,
                                        derive_seed(seed, kFactorStream), config.use_noise_factor);
  }
  model.classifier = init_classifier(config.heads(), channels, derive_seed(seed, kClassifierStream));
  return model;
}

Tensor training_targets(const Tensor& labels, const ModelConfig& config) {
  if (labels.numel() != config.num_attributes) {
    throw DimensionError("labels have " + std::to_string(labels.numel()) +
                         " attributes, model expects " + std::to_string(config.num_attributes));
  }
  std::vector<double> y(labels.data().begin(), labels.data().end());
  if (config.use_noise_factor) y.push_back(0.0);
  const auto n = y.size();
  return Tensor({n}, std::move(y));
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train: lr_decay must lie in (0, 1]");
  if (lr_decay_every == 0) throw ConfigError("train: lr_decay_every must be positive");
  if (!(gamma >= 0.0)) throw ConfigError("train: gamma must be non-negative");
  if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be non-negative");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
}

double TrainConfig::lr_at_epoch(std::size_t epoch) const {
  return lr * std::pow(lr_decay, static_cast<double>(epoch / lr_decay_every));
}

void adam_step(std::span<Tensor> params, AdamState& state, double lr,
               std::span<const double> weight_decay, const AdamOptions& options) {
  if (weight_decay.size() != params.size()) {
    throw DimensionError("adam_step: " + std::to_string(weight_decay.size()) +
                         " weight-decay values for " + std::to_string(params.size()) +
                         " parameters");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.numel(), 0.0);
      state.v.emplace_back(p.numel(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_data();
    const auto grad = params[k].grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (m.size() != values.size()) {
      throw DimensionError("adam_step: state/parameter size mismatch at index " +
                           std::to_string(k));
    }
    const double decay = lr * weight_decay[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad.empty() ? 0.0 : grad[i];
      values[i] -= decay * values[i];
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g;
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      values[i] -= lr * m_hat / (std::sqrt(v_hat) + options.eps);
    }
  }
}

ModelConfig model_config_for(const TrainConfig& train, const ExtractorConfig& extractor,
                             std::size_t num_attributes) {
  ModelConfig c;
  c.extractor = extractor;
  c.num_attributes = num_attributes;
  c.use_asd = train.use_asd;
  c.use_noise_factor = train.use_noise_factor;
  c.use_mean_feature = train.use_mean_feature;
  return c;
}

std::vector<Tensor> predict_all(const Model& model, const std::vector<SyntheticSample>& samples) {
  NoGradGuard no_grad;
  std::vector<Tensor> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(model.forward(s.image).probabilities);
  return out;
}

AccuracyReport evaluate(const Model& model, const std::vector<SyntheticSample>& samples) {
  std::vector<Tensor> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.labels.numel() != model.config.num_attributes) {
      throw DimensionError("evaluate: data has D=" + std::to_string(s.labels.numel()) +
                           ", model has D=" + std::to_string(model.config.num_attributes));
    }
    labels.push_back(s.labels);
  }
  return evaluate_accuracy(predict_all(model, samples), labels);
}

TrainResult train(const TrainConfig& config, const ExtractorConfig& extractor,
                  const std::vector<SyntheticSample>& train_split,
                  const std::vector<SyntheticSample>& val_split,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (train_split.empty()) throw DomainError("train: empty training split");
  if (val_split.empty()) throw DomainError("train: empty validation split");
  const auto d = train_split.front().labels.numel();
  const auto model_config = model_config_for(config, extractor, d);

  TrainResult result{init_model(model_config, config.seed), {}};
  Model& model = result.model;
  auto params = model.parameters();
  std::vector<double> decay;
  for (bool b : model.decay_mask()) decay.push_back(b ? config.weight_decay : 0.0);

  std::vector<Tensor> targets;
  targets.reserve(train_split.size());
  for (const auto& s : train_split) targets.push_back(training_targets(s.labels, model_config));

  const bool with_cmm = config.use_cmm && model.factors.has_value();
  AdamState adam;
  Rng order_rng(derive_seed(config.seed, kOrderStream));
  std::vector<std::size_t> order(train_split.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.lr_at_epoch(epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[order_rng.below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      for (auto& p : params) p.zero_grad();

      Tensor batch_loss = Tensor::scalar(0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto idx = order[b];
        Tensor image = train_split[idx].image;
        if (config.flip_augment && order_rng.bernoulli(0.5)) {
          image = flip_horizontal(train_split[idx]).image;
        }
        const auto out = model.forward(image);
        batch_loss = add(batch_loss, classification_loss(out.probabilities, targets[idx],
                                                         model_config.use_noise_factor));
      }
      const auto count = static_cast<double>(end - start);
      batch_loss = scalar_mul(batch_loss, 1.0 / count);
      if (with_cmm) batch_loss = total_loss(batch_loss, cmm_loss(*model.factors), config.gamma);

      const double value = batch_loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", step " +
                           std::to_string(step + 1));
      }
      backward(batch_loss);
      adam_step(params, adam, lr, decay);
      loss_sum += value * count;
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<double>(train_split.size());
    rec.val_acc = evaluate(model, val_split).mean;
    if (model.factors) {
      NoGradGuard no_grad;
      rec.offdiag_mean = offdiag_abs_mean(correlation_matrix(*model.factors));
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "epoch,train_loss,val_acc,offdiag_mean\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << fmt_double(r.train_loss) << ',' << fmt_double(r.val_acc) << ','
        << fmt_double(r.offdiag_mean) << '\n';
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<std::uint8_t> encode_checkpoint(const Model& model) {
  return encode_archive(model.named_tensors());
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(model));
}

Model decode_checkpoint(std::span<const std::uint8_t> bytes) {
  const auto entries = decode_archive(bytes);
  Model model = init_model(decode_model_config(find_entry(entries, "meta.model")), 0);
  for (const auto& [name, expected] : model.named_tensors()) {
    if (name == "meta.model") continue;
    const auto& found = find_entry(entries, name);
    if (found.shape() != expected.shape()) {
      throw DimensionError("checkpoint entry '" + name + "': expected shape " +
                           shape_str(expected.shape()) + ", found " + shape_str(found.shape()));
    }
    // named_tensors() aliases the model's parameters, so this writes into them.
    Tensor target = expected;
    std::copy(found.data().begin(), found.data().end(), target.mutable_data().begin());
  }
  if (entries.size() != model.named_tensors().size()) {
    throw FormatError("checkpoint has " + std::to_string(entries.size()) +
                          " entries, model defines " +
                          std::to_string(model.named_tensors().size()),
                      0);
  }
  return model;
}

Model load_checkpoint(const std::filesystem::path& path,
                      std::optional<std::size_t> expected_attributes) {
  Model model = decode_checkpoint(read_file_bytes(path));
  if (expected_attributes && *expected_attributes != model.config.num_attributes) {
    throw DimensionError("checkpoint " + path.string() + ": expected D=" +
                         std::to_string(*expected_attributes) + ", found D=" +
                         std::to_string(model.config.num_attributes));
  }
  return model;
}

}  // namespace asd
