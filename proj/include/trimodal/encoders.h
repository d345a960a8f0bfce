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
#include <cstdint>
#include <string>
#include <vector>

#include "trimodal/archive.h"
#include "trimodal/audio.h"
#include "trimodal/tensor.h"

namespace trimodal {

enum class Modality { kImage, kAudio, kText };

const char* modality_name(Modality m);

// Spatially localized embeddings, [rows, cols, emb].
struct ImageGridFeatures {
  Tensor grid;

  std::size_t rows() const { return grid.dim(0); }
  std::size_t cols() const { return grid.dim(1); }
  std::size_t emb() const { return grid.dim(2); }
};

// Temporally (audio) or positionally (text) localized embeddings, [n, emb].
struct SequenceFeatures {
  Tensor seq;
  Modality modality = Modality::kAudio;

  std::size_t length() const { return seq.dim(0); }
  std::size_t emb() const { return seq.dim(1); }
};

struct TokenSequence {
  std::vector<std::size_t> ids;
};

struct ImageEncoderConfig {
  std::size_t in_channels = 3;
  // One conv3x3 + ReLU + maxpool(2) stage per entry.
  std::vector<std::size_t> stage_channels = {8, 8, 16};
  std::size_t emb_size = 16;
};

/// Stacked conv3x3/ReLU/maxpool stages followed by a 1x1 projection to the
/// embedding size. An H x W image maps to an (H/2^L) x (W/2^L) grid.
class ImageEncoder {
 public:
  ImageEncoder(const ImageEncoderConfig& cfg, std::uint64_t seed);

  ImageGridFeatures encode(const Tensor& image) const;
  std::size_t downsample() const { return std::size_t{1} << cfg_.stage_channels.size(); }
  const ImageEncoderConfig& config() const { return cfg_; }
  std::vector<Tensor> parameters() const;

 private:
  ImageEncoderConfig cfg_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

struct AudioEncoderConfig {
  std::size_t n_mels = 40;
  std::size_t hidden = 16;
  std::size_t first_kernel = 5;
  std::size_t emb_size = 16;
};

/// 1-D convolutional speech encoder over [frames, n_mels]. The first layer
/// spans all mel bands; two width-2 temporal pools give a downsample of 4.
class AudioEncoder {
 public:
  static constexpr std::size_t kTemporalDownsample = 4;

  AudioEncoder(const AudioEncoderConfig& cfg, std::uint64_t seed);

  SequenceFeatures encode(const Tensor& spectrogram) const;
  SequenceFeatures encode(const LogMelSpectrogram& spectrogram) const;
  const AudioEncoderConfig& config() const { return cfg_; }
  std::vector<Tensor> parameters() const;

 private:
  AudioEncoderConfig cfg_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

struct TextEncoderConfig {
  std::size_t vocab_size = 64;
  std::size_t emb_size = 16;
  bool frozen = true;
};

/// Token-embedding lookup table with rows drawn uniform(-0.5, 0.5). When
/// frozen the table never receives a gradient.
class TextEncoder {
 public:
  TextEncoder(const TextEncoderConfig& cfg, std::uint64_t seed);

  SequenceFeatures encode(const TokenSequence& tokens) const;
  const Tensor& table() const { return table_; }
  const TextEncoderConfig& config() const { return cfg_; }
  // Empty when frozen.
  std::vector<Tensor> parameters() const;

 private:
  TextEncoderConfig cfg_;
  Tensor table_;
};

// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) weights.
Tensor init_weight(Shape shape, std::size_t fan_in, std::uint64_t seed, std::string name);

}  // namespace trimodal
