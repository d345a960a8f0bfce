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

#include "trimodal/encoders.h"

#include <cmath>
#include <stdexcept>

#include "trimodal/ops.h"
#include "trimodal/random.h"

namespace trimodal {

const char* modality_name(Modality m) {
  switch (m) {
    case Modality::kImage: return "image";
    case Modality::kAudio: return "audio";
    case Modality::kText: return "text";
  }
  return "?";
}

Tensor init_weight(Shape shape, std::size_t fan_in, std::uint64_t seed, std::string name) {
  Rng rng(seed);
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(-bound, bound);
  Tensor t(std::move(shape), std::move(v), true);
  t.set_name(std::move(name));
  return t;
}

namespace {

Tensor zero_bias(std::size_t n, std::string name) {
  Tensor t(Shape{n}, 0.0, true);
  t.set_name(std::move(name));
  return t;
}

}  // namespace

ImageEncoder::ImageEncoder(const ImageEncoderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.stage_channels.empty()) throw std::invalid_argument("image encoder: needs at least one stage");
  if (cfg.in_channels == 0 || cfg.emb_size == 0) throw std::invalid_argument("image encoder: zero channels");
  std::size_t in = cfg.in_channels;
  for (std::size_t s = 0; s < cfg.stage_channels.size(); ++s) {
    const std::size_t out = cfg.stage_channels[s];
    const std::string base = "image.conv" + std::to_string(s);
    weights_.push_back(init_weight({3, 3, in, out}, 9 * in, derive_seed(seed, s), base + ".weight"));
    biases_.push_back(zero_bias(out, base + ".bias"));
    in = out;
  }
  weights_.push_back(init_weight({1, 1, in, cfg.emb_size}, in,
                                 derive_seed(seed, cfg.stage_channels.size()), "image.proj.weight"));
  biases_.push_back(zero_bias(cfg.emb_size, "image.proj.bias"));
}

ImageGridFeatures ImageEncoder::encode(const Tensor& image) const {
  if (image.rank() != 3 || image.dim(2) != cfg_.in_channels) {
    throw std::invalid_argument("encode_image: expected [H, W, " + std::to_string(cfg_.in_channels) +
                                "] image, got " + shape_str(image.shape()));
  }
  const std::size_t factor = downsample();
  if (image.dim(0) % factor != 0 || image.dim(1) % factor != 0) {
    throw std::invalid_argument("encode_image: image " + std::to_string(image.dim(0)) + "x" +
                                std::to_string(image.dim(1)) +
                                " is not divisible by the required factor " + std::to_string(factor));
  }
  Tensor h = image;
  const std::size_t stages = cfg_.stage_channels.size();
  for (std::size_t s = 0; s < stages; ++s) {
    h = maxpool2d(relu(conv2d(h, weights_[s], biases_[s])));
  }
  return {conv2d(h, weights_[stages], biases_[stages])};
}

std::vector<Tensor> ImageEncoder::parameters() const {
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    out.push_back(weights_[i]);
    out.push_back(biases_[i]);
  }
  return out;
}

AudioEncoder::AudioEncoder(const AudioEncoderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.n_mels == 0 || cfg.hidden == 0 || cfg.emb_size == 0) {
    throw std::invalid_argument("audio encoder: zero channels");
  }
  if (cfg.first_kernel % 2 == 0) throw std::invalid_argument("audio encoder: first_kernel must be odd");
  const std::size_t k0 = cfg.first_kernel;
  weights_.push_back(init_weight({k0, cfg.n_mels, cfg.hidden}, k0 * cfg.n_mels,
                                 derive_seed(seed, 0), "audio.conv0.weight"));
  weights_.push_back(init_weight({3, cfg.hidden, cfg.hidden}, 3 * cfg.hidden,
                                 derive_seed(seed, 1), "audio.conv1.weight"));
  weights_.push_back(init_weight({1, cfg.hidden, cfg.emb_size}, cfg.hidden,
                                 derive_seed(seed, 2), "audio.proj.weight"));
  biases_.push_back(zero_bias(cfg.hidden, "audio.conv0.bias"));
  biases_.push_back(zero_bias(cfg.hidden, "audio.conv1.bias"));
  biases_.push_back(zero_bias(cfg.emb_size, "audio.proj.bias"));
}

SequenceFeatures AudioEncoder::encode(const Tensor& spectrogram) const {
  if (spectrogram.rank() != 2 || spectrogram.dim(1) != cfg_.n_mels) {
    throw std::invalid_argument("encode_audio: expected [frames, " + std::to_string(cfg_.n_mels) +
                                "] spectrogram, got " + shape_str(spectrogram.shape()));
  }
  if (spectrogram.dim(0) < kTemporalDownsample) {
    throw std::invalid_argument("encode_audio: " + std::to_string(spectrogram.dim(0)) +
                                " frames is shorter than the temporal downsample " +
                                std::to_string(kTemporalDownsample));
  }
  Tensor h = maxpool1d(relu(conv1d(spectrogram, weights_[0], biases_[0])));
  h = maxpool1d(relu(conv1d(h, weights_[1], biases_[1])));
  return {conv1d(h, weights_[2], biases_[2]), Modality::kAudio};
}

SequenceFeatures AudioEncoder::encode(const LogMelSpectrogram& spectrogram) const {
  return encode(spectrogram.to_tensor());
}

std::vector<Tensor> AudioEncoder::parameters() const {
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    out.push_back(weights_[i]);
    out.push_back(biases_[i]);
  }
  return out;
}

TextEncoder::TextEncoder(const TextEncoderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.vocab_size == 0 || cfg.emb_size == 0) throw std::invalid_argument("text encoder: empty table");
  Rng rng(seed);
  std::vector<double> v(cfg.vocab_size * cfg.emb_size);
  for (double& x : v) x = rng.uniform(-0.5, 0.5);
  table_ = Tensor(Shape{cfg.vocab_size, cfg.emb_size}, std::move(v), !cfg.frozen);
  table_.set_name("text.table");
}

SequenceFeatures TextEncoder::encode(const TokenSequence& tokens) const {
  if (tokens.ids.empty()) throw std::invalid_argument("encode_text: empty token sequence");
  for (std::size_t id : tokens.ids) {
    if (id >= cfg_.vocab_size) {
      throw std::out_of_range("encode_text: token id " + std::to_string(id) +
                              " outside vocabulary of size " + std::to_string(cfg_.vocab_size));
    }
  }
  return {gather_rows(table_, tokens.ids), Modality::kText};
}

std::vector<Tensor> TextEncoder::parameters() const {
  if (cfg_.frozen) return {};
  return {table_};
}

}  // namespace trimodal
