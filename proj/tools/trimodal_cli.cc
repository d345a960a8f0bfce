// Copyright 2026 The Trimodal Embedding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// trimodal_cli: synthetic corpora, annotation preparation, training,
// evaluation and self-checks for the tri-modal embedding library.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "trimodal/config.h"
#include "trimodal/corpus.h"
#include "trimodal/fileio.h"
#include "trimodal/pipeline.h"
#include "trimodal/selfcheck.h"

namespace fs = std::filesystem;
using namespace trimodal;

namespace {

// Training flags mirror the config keys one to one.
struct ConfigFlags {
  std::string config_path;
  std::string preset;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value configuration file");
    cmd->add_option("--preset", preset, "epic or places")->check(CLI::IsMember({"epic", "places"}));
    for (const std::string& key : config_keys()) {
      cmd->add_option("--" + key, values[key], "overrides '" + key + "'");
    }
  }

  // Preset, then file, then flags.
  TrainConfig resolve(const CLI::App* cmd) const {
    TrainConfig cfg;
    if (!preset.empty()) apply_preset(cfg, preset);
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) {
        throw std::runtime_error("config file not found: " + config_path);
      }
      try {
        apply_config_text(cfg, read_file(config_path));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(config_path + ": " + e.what());
      }
    }
    for (const auto& [key, value] : values) {
      if (cmd->count("--" + key) > 0) apply_config_key(cfg, key, value);
    }
    validate(cfg);
    return cfg;
  }
};

int run_synth(const fs::path& out, SyntheticConfig cfg) {
  const SyntheticCorpus corpus = generate_synthetic_corpus(cfg);
  write_synthetic_corpus(out, corpus);
  std::printf("wrote %zu train and %zu val records to %s (vocabulary %zu)\n",
              corpus.train.records.size(), corpus.val.records.size(), out.string().c_str(),
              corpus.vocab_size);
  return 0;
}

int run_prep(const fs::path& actions, const fs::path& narrations, const fs::path& out,
             const PrepConfig& cfg) {
  const PreparedCorpus prepared =
      prepare_corpus(parse_actions(read_file(actions)), parse_narrations(read_file(narrations)), cfg);
  fs::create_directories(out);
  write_manifest(out / "manifest.tsv", prepared.records);
  std::string vocab;
  for (const std::string& w : prepared.vocabulary) vocab += w + "\n";
  write_file_atomic(out / "vocab.txt", vocab);
  const std::string report = format_prep_report(prepared.report);
  write_file_atomic(out / "drop_report.txt", report);
  std::fputs(report.c_str(), stdout);
  return 0;
}

void print_recalls(const std::vector<RecallReport>& reports) {
  for (const RecallReport& r : reports) {
    std::printf("%s", direction_name(r.direction));
    for (const auto& [k, value] : r.recall) std::printf(" R@%zu=%.4f", k, value);
    std::printf("\n");
  }
}

int run_train(const fs::path& train_manifest, const std::string& val_manifest, const fs::path& out,
              const TrainConfig& cfg) {
  const Dataset train_set = load_dataset(train_manifest);
  Dataset val_set;
  if (!val_manifest.empty()) val_set = load_dataset(val_manifest);
  const TrainResult result = train(train_set, val_manifest.empty() ? nullptr : &val_set, cfg);
  fs::create_directories(out);
  result.model.to_archive().save(out / "checkpoint.tmck");
  write_file_atomic(out / "config.cfg", format_config(cfg));
  write_file_atomic(out / "loss.csv", format_loss_csv(result.log));
  write_file_atomic(out / "metrics.csv", format_metrics_csv(result.log, cfg));
  if (!result.log.epochs.empty()) {
    const EpochRecord& last = result.log.epochs.back();
    std::printf("epoch %zu lr=%.6g mean_loss=%.6g\n", last.epoch, last.learning_rate, last.mean_loss);
    print_recalls(last.recalls);
  }
  return 0;
}

int run_eval(const fs::path& manifest, const fs::path& checkpoint, const std::string& out,
             TrainConfig cfg) {
  const Dataset data = load_dataset(manifest);
  const TensorArchive archive = TensorArchive::load(checkpoint);
  if (cfg.vocab_size == 0 && archive.contains("text.table")) {
    cfg.vocab_size = archive.get("text.table").shape.at(0);
  }
  Model model = Model::create(cfg, data);
  model.load_archive(archive);
  RunLog log;
  log.epochs.push_back({0, 0.0, 0.0, evaluate(data, model, cfg)});
  print_recalls(log.epochs.back().recalls);
  if (!out.empty()) write_file_atomic(out, format_metrics_csv(log, cfg));
  return 0;
}

int run_gradcheck(std::uint64_t seed, std::size_t seeds, double tolerance) {
  std::map<std::string, GradCheckResult> worst;
  std::vector<std::string> order;
  for (std::size_t s = 0; s < seeds; ++s) {
    for (const GradSuiteLine& line : gradient_suite(seed + s)) {
      auto [it, fresh] = worst.try_emplace(line.name, line.result);
      if (fresh) {
        order.push_back(line.name);
        continue;
      }
      it->second.checked += line.result.checked;
      it->second.skipped += line.result.skipped;
      if (line.result.max_relative_error > it->second.max_relative_error) {
        it->second.max_relative_error = line.result.max_relative_error;
        it->second.worst = line.result.worst;
      }
    }
  }
  double overall = 0.0;
  for (const std::string& name : order) {
    const GradCheckResult& r = worst[name];
    std::printf("%-26s max_rel_error=%.3e checked=%zu skipped=%zu\n", name.c_str(),
                r.max_relative_error, r.checked, r.skipped);
    overall = std::max(overall, r.max_relative_error);
  }
  std::printf("overall max_rel_error=%.3e (tolerance %.1e)\n", overall, tolerance);
  return overall < tolerance ? 0 : 1;
}

int run_oracle_check(std::uint64_t seed, std::size_t instances, double tolerance) {
  double overall = 0.0;
  for (const OracleSuiteLine& line : oracle_suite(seed, instances)) {
    std::printf("%-16s instances=%zu max_deviation=%.3e\n", line.name.c_str(), line.instances,
                line.max_deviation);
    overall = std::max(overall, line.max_deviation);
  }
  std::printf("overall max_deviation=%.3e (tolerance %.1e)\n", overall, tolerance);
  return overall <= tolerance ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tri-modal image/audio/text joint embedding toolkit"};
  app.require_subcommand(1, 1);

  auto* synth = app.add_subcommand("synth", "write a synthetic planted-concept corpus");
  SyntheticConfig sc;
  std::string synth_out = "synthetic";
  std::size_t grid = sc.grid_rows;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", sc.seed, "generator seed");
  synth->add_option("--concepts", sc.n_concepts, "number of concepts");
  synth->add_option("--train", sc.n_train, "training records");
  synth->add_option("--val", sc.n_val, "validation records (distinct concepts)");
  synth->add_option("--grid", grid, "image grid rows and columns");
  synth->add_option("--audio-length", sc.audio_length, "encoder frames per audio clip");
  synth->add_option("--feature-dim", sc.feature_dim, "image channels and mel bands");
  synth->add_option("--noise", sc.noise_sigma, "noise standard deviation");
  synth->add_option("--fillers", sc.filler_tokens, "filler tokens per caption");

  auto* prep = app.add_subcommand("prep", "align annotation tables into a manifest");
  PrepConfig pc;
  std::string actions, narrations, prep_out = "prepared";
  prep->add_option("--actions", actions, "action table (tsv)")->required();
  prep->add_option("--narrations", narrations, "narration table (tsv)")->required();
  prep->add_option("--out", prep_out, "output directory");
  prep->add_option("--language", pc.language, "kept action language tag");
  prep->add_option("--fps", pc.fps, "video frame rate");
  prep->add_option("--val-fraction", pc.val_fraction, "fraction of clips for validation");
  prep->add_option("--test-fraction", pc.test_fraction, "fraction of clips for test");
  prep->add_option("--seed", pc.seed, "split shuffle seed");

  auto* train_cmd = app.add_subcommand("train", "train encoders and write a run log");
  ConfigFlags train_flags;
  std::string train_manifest, val_manifest, train_out = "run";
  train_cmd->add_option("--train-manifest", train_manifest, "training manifest")->required();
  train_cmd->add_option("--val-manifest", val_manifest, "validation manifest");
  train_cmd->add_option("--out", train_out, "output directory");
  train_flags.attach(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "retrieval recall of a checkpoint");
  ConfigFlags eval_flags;
  std::string eval_manifest, checkpoint, metrics_out;
  eval_cmd->add_option("--manifest", eval_manifest, "evaluation manifest")->required();
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--metrics", metrics_out, "metrics csv output");
  eval_flags.attach(eval_cmd);

  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  std::uint64_t grad_seed = 0;
  std::size_t grad_seeds = 1;
  double grad_tol = 1e-4;
  grad_cmd->add_option("--seed", grad_seed, "first seed");
  grad_cmd->add_option("--seeds", grad_seeds, "number of seeds")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--tolerance", grad_tol, "maximum relative error");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare against naive references");
  std::uint64_t oracle_seed = 0;
  std::size_t instances = 100;
  double oracle_tol = 1e-10;
  oracle_cmd->add_option("--seed", oracle_seed, "seed");
  oracle_cmd->add_option("--instances", instances, "random instances")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--tolerance", oracle_tol, "maximum absolute deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code;
  }

  try {
    if (*synth) {
      sc.grid_rows = sc.grid_cols = grid;
      return run_synth(synth_out, sc);
    }
    if (*prep) return run_prep(actions, narrations, prep_out, pc);
    if (*train_cmd) return run_train(train_manifest, val_manifest, train_out, train_flags.resolve(train_cmd));
    if (*eval_cmd) return run_eval(eval_manifest, checkpoint, metrics_out, eval_flags.resolve(eval_cmd));
    if (*grad_cmd) return run_gradcheck(grad_seed, grad_seeds, grad_tol);
    if (*oracle_cmd) return run_oracle_check(oracle_seed, instances, oracle_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
