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

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "trimodal/archive.h"
#include "trimodal/config.h"
#include "trimodal/corpus.h"
#include "trimodal/encoders.h"
#include "trimodal/retrieval.h"

namespace trimodal {

// Records of one split with their image and spectrogram payloads resolved.
struct Dataset {
  std::vector<TupleRecord> records;
  std::vector<Tensor> images;        // [H, W, C]
  std::vector<Tensor> spectrograms;  // [frames, bands]

  std::size_t size() const { return records.size(); }
};

// Payload references resolve relative to the manifest's directory.
Dataset load_dataset(const std::filesystem::path& manifest);
Dataset make_dataset(const SyntheticSplit& split);

struct Model {
  ImageEncoder image;
  AudioEncoder audio;
  TextEncoder text;

  // Seeded from cfg.seed; input sizes come from the training data.
  static Model create(const TrainConfig& cfg, std::size_t image_channels, std::size_t n_mels,
                      std::size_t vocab_size);
  static Model create(const TrainConfig& cfg, const Dataset& data);

  // Tensors updated by the optimizer (the text table only when unfrozen).
  std::vector<Tensor> trainable() const;
  // Every tensor, text table included.
  TensorArchive to_archive() const;
  // Copies values in; names and shapes must match.
  void load_archive(const TensorArchive& archive);
};

struct EpochRecord {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double mean_loss = 0.0;
  std::vector<RecallReport> recalls;  // empty on non-evaluation epochs
};

struct RunLog {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  Model model;
  RunLog log;
};

inline const std::vector<std::size_t> kRecallKs = {1, 5, 10};

/// Seeded shuffled minibatches each epoch; per step: encode, sample
/// impostors, ranking loss (trimodal or image-audio only), backward, SGD
/// step at lr_at_epoch. `validation` may be null to skip evaluation.
TrainResult train(const Dataset& train_set, const Dataset* validation, const TrainConfig& cfg);
// Continues from an existing model (epochs counted from 0).
RunLog train_model(Model& model, const Dataset& train_set, const Dataset* validation,
                   const TrainConfig& cfg);

// Image-query and audio-query recall at K in kRecallKs over the image-audio
// similarity matrix.
std::vector<RecallReport> evaluate(const Dataset& split, const Model& model, const TrainConfig& cfg);

// First line: run metadata; then "epoch,direction,k,recall" rows.
std::string format_metrics_csv(const RunLog& log, const TrainConfig& cfg);
// "epoch,lr,mean_loss" rows.
std::string format_loss_csv(const RunLog& log);

// Maximum token id + 1 over the given datasets.
std::size_t infer_vocab_size(const std::vector<const Dataset*>& sets);

}  // namespace trimodal
