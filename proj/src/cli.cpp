// src/cli.cpp

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

#include "asd/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "asd/asdt_io.hpp"
#include "asd/cmm.hpp"
#include "asd/config.hpp"
#include "asd/errors.hpp"
#include "asd/heatmap.hpp"
#include "asd/trainer.hpp"

namespace asd {

namespace fs = std::filesystem;

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("ASD_LOG");
  const std::string value = level ? level : "info";
  if (value == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (value == "quiet") {
    spdlog::set_level(spdlog::level::warn);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

bool looks_like_asdt(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string(magic, 4) == "ASDT";
}

TrainResult run_training(const ExperimentConfig& cfg) {
  const auto train_split = make_train_split(cfg);
  const auto val_split = make_val_split(cfg);
  return train(cfg.train, cfg.extractor, train_split, val_split, [](const EpochRecord& r) {
    spdlog::info("epoch {:3d}  loss {:.6f}  val_acc {:.3f}  offdiag {:.4f}", r.epoch,
                 r.train_loss, r.val_acc, r.offdiag_mean);
  });
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  auto cfg = load_config(config_path);
  if (seed) cfg.train.seed = *seed;
  fs::create_directories(out_dir);
  const auto result = run_training(cfg);
  const fs::path out(out_dir);
  save_checkpoint(result.model, out / "checkpoint.asdt");
  write_history_csv(out / "history.csv", result.history);
  {
    std::ofstream cfg_out(out / "config.cfg");
    cfg_out << format_config(cfg);
  }
  if (result.model.factors) {
    NoGradGuard no_grad;
    save_tensor(out / "correlation.asdt", correlation_matrix(*result.model.factors));
  }
  const double acc = result.history.empty() ? evaluate(result.model, make_val_split(cfg)).mean
                                            : result.history.back().val_acc;
  std::cout << "val_acc=" << exact(acc) << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& data) {
  std::vector<SyntheticSample> samples;
  if (looks_like_asdt(data)) {
    samples = load_shard(data);
  } else {
    samples = make_val_split(load_config(data));
  }
  const auto model = load_checkpoint(checkpoint, samples.front().labels.numel());
  const auto report = evaluate(model, samples);
  std::cout << "mean_accuracy=" << exact(report.mean) << '\n';
  for (std::size_t j = 0; j < report.per_attribute.size(); ++j) {
    std::cout << "attribute_" << j << "=" << exact(report.per_attribute[j]) << '\n';
  }
  return kExitOk;
}

struct Variant {
  std::string name;
  bool use_asd, use_noise_factor, use_mean_feature, use_cmm;
};

std::vector<Variant> ablation_grid() {
  std::vector<Variant> out{{"pooled_baseline", false, false, false, false}};
  for (int noise = 1; noise >= 0; --noise) {
    for (int mean = 1; mean >= 0; --mean) {
      for (int cmm = 1; cmm >= 0; --cmm) {
        std::string name = "asd";
        name += noise ? "+noise" : "-noise";
        name += mean ? "+mean" : "-mean";
        name += cmm ? "+cmm" : "-cmm";
        out.push_back({name, true, noise == 1, mean == 1, cmm == 1});
      }
    }
  }
  return out;
}

int cmd_ablate(const std::string& config_path, const std::string& out_dir, std::size_t seeds) {
  const auto base = load_config(config_path);
  fs::create_directories(out_dir);
  const auto train_split = make_train_split(base);
  const auto val_split = make_val_split(base);
  std::ofstream csv(fs::path(out_dir) / "ablation.csv");
  if (!csv) throw IoError("cannot write ablation.csv in " + out_dir);
  csv << "variant,use_asd,use_noise_factor,use_mean_feature,use_cmm,seed,val_acc\n";
  for (const auto& v : ablation_grid()) {
    for (std::size_t s = 0; s < seeds; ++s) {
      auto cfg = base.train;
      cfg.seed = base.train.seed + s;
      cfg.use_asd = v.use_asd;
      cfg.use_noise_factor = v.use_noise_factor;
      cfg.use_mean_feature = v.use_mean_feature;
      cfg.use_cmm = v.use_cmm;
      const auto result = train(cfg, base.extractor, train_split, val_split);
      const double acc = result.history.empty() ? evaluate(result.model, val_split).mean
                                                : result.history.back().val_acc;
      spdlog::info("{} seed {}: val_acc {:.3f}", v.name, cfg.seed, acc);
      csv << v.name << ',' << v.use_asd << ',' << v.use_noise_factor << ','
          << v.use_mean_feature << ',' << v.use_cmm << ',' << cfg.seed << ',' << exact(acc)
          << '\n';
    }
  }
  std::cout << "wrote " << (fs::path(out_dir) / "ablation.csv").string() << '\n';
  return kExitOk;
}

int cmd_export(const std::string& checkpoint, std::uint64_t sample_seed, const std::string& out_dir,
               const std::string& config_path) {
  const auto model = load_checkpoint(checkpoint);
  if (!model.config.use_asd) {
    throw ContractError("export-heatmaps: checkpoint is a pooled baseline without assignments");
  }
  GeneratorConfig gen;
  if (!config_path.empty()) gen = load_config(config_path).generator;
  gen.num_attributes = model.config.num_attributes;
  gen.channels = model.config.extractor.in_channels;
  const auto sample = generate(sample_seed, 0, gen);

  Model::Output out;
  {
    NoGradGuard no_grad;
    out = model.forward(sample.image);
  }
  const auto stack =
      rearrange_assignment(out.assignment, out.features.height, out.features.width);
  fs::create_directories(out_dir);
  const auto factors = stack.dim(2);
  for (std::size_t j = 0; j < factors; ++j) {
    const bool noise = model.config.use_noise_factor && j + 1 == factors;
    char name[32];
    std::snprintf(name, sizeof name, noise ? "noise.pgm" : "attr_%02zu.pgm", j);
    write_heatmap_pgm(heatmap_channel(stack, j), fs::path(out_dir) / name);
  }
  const auto scores = localization_score(stack, sample.masks, gen.image_size);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    std::cout << "attribute_" << j << " label=" << sample.labels[j]
              << " iou=" << (scores[j] ? exact(*scores[j]) : std::string("absent")) << '\n';
  }
  std::cout << "wrote " << factors << " heatmaps to " << out_dir << '\n';
  return kExitOk;
}

int cmd_gen_data(const std::string& config_path, const std::string& split, const std::string& out) {
  const auto cfg = load_config(config_path);
  std::uint64_t seed = cfg.data_seed;
  std::size_t n = cfg.train_size;
  if (split == "val") {
    seed += 1;
    n = cfg.val_size;
  } else if (split == "test") {
    seed += 2;
    n = cfg.val_size;
  }
  save_shard(out, make_split(seed, n, cfg.generator));
  std::cout << "wrote " << n << " samples to " << out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  configure_logging();
  CLI::App app{"Attribute spatial decomposition: training, evaluation and heatmap export", "asd"};
  app.require_subcommand(1);

  std::string config, out, checkpoint, data;
  std::uint64_t seed = 0;
  std::uint64_t sample_seed = 0;
  std::size_t seeds = 1;
  std::string split = "train";

  auto* train_cmd = app.add_subcommand("train", "train a model on synthetic data");
  train_cmd->add_option("--config", config, "key=value config file")->required();
  train_cmd->add_option("--out", out, "output directory")->required();
  auto* seed_opt = train_cmd->add_option("--seed", seed, "override the training seed");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint)->required();
  eval_cmd->add_option("--data", data, "ASDT shard or config file (uses its val split)")->required();

  auto* ablate_cmd = app.add_subcommand("ablate", "run the ablation grid");
  ablate_cmd->add_option("--config", config)->required();
  ablate_cmd->add_option("--out", out)->required();
  ablate_cmd->add_option("--seeds", seeds, "seeds per variant")->check(CLI::PositiveNumber);

  auto* export_cmd = app.add_subcommand("export-heatmaps", "write per-factor assignment heatmaps");
  export_cmd->add_option("--checkpoint", checkpoint)->required();
  export_cmd->add_option("--sample-seed", sample_seed)->required();
  export_cmd->add_option("--out", out)->required();
  export_cmd->add_option("--config", config, "generator settings for the sample");

  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic split as an ASDT shard");
  gen_cmd->add_option("--config", config)->required();
  gen_cmd->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}));
  gen_cmd->add_option("--out", out)->required();

  std::vector<std::string> argv_store{"asd"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      return cmd_train(config, out, seed_opt->count() ? std::optional(seed) : std::nullopt);
    }
    if (*eval_cmd) return cmd_eval(checkpoint, data);
    if (*ablate_cmd) return cmd_ablate(config, out, seeds);
    if (*export_cmd) return cmd_export(checkpoint, sample_seed, out, config);
    if (*gen_cmd) return cmd_gen_data(config, split, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace asd
