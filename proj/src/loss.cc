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

#include "trimodal/loss.h"

#include <stdexcept>
#include <string>

#include "trimodal/ops.h"

namespace trimodal {

namespace {

std::size_t used_slots(const ImpostorSet& imp) { return imp.trimodal ? 6 : 2; }

void check_batch(const Minibatch& batch, bool trimodal) {
  const std::size_t b = batch.size();
  if (batch.audio.size() != b || (trimodal && batch.text.size() != b)) {
    throw std::invalid_argument("minibatch: modality lists have different lengths");
  }
}

void check_modes(const MarginConfig& cfg, bool trimodal) {
  validate(cfg);
  if (pooling_pair(cfg.image_audio.pooling) != ModalityPair::kImageAudio) {
    throw std::invalid_argument(std::string("loss: ") + pooling_name(cfg.image_audio.pooling) +
                                " is not an image-audio similarity");
  }
  if (!trimodal) return;
  if (pooling_pair(cfg.image_text.pooling) != ModalityPair::kImageText) {
    throw std::invalid_argument(std::string("loss: ") + pooling_name(cfg.image_text.pooling) +
                                " is not an image-text similarity");
  }
  if (pooling_pair(cfg.text_audio.pooling) != ModalityPair::kTextAudio) {
    throw std::invalid_argument(std::string("loss: ") + pooling_name(cfg.text_audio.pooling) +
                                " is not a text-audio similarity");
  }
}

std::size_t argmax_excluding(std::span<const double> s, std::size_t b, std::size_t fixed,
                             bool fixed_is_row, std::size_t anchor) {
  std::size_t best = anchor == 0 ? 1 : 0;
  for (std::size_t c = 0; c < b; ++c) {
    if (c == anchor) continue;
    const double v = fixed_is_row ? s[fixed * b + c] : s[c * b + fixed];
    const double bv = fixed_is_row ? s[fixed * b + best] : s[best * b + fixed];
    if (v > bv) best = c;
  }
  return best;
}

}  // namespace

void validate(const MarginConfig& cfg) {
  if (!(cfg.eta >= 0.0)) throw std::invalid_argument("margin: eta must be non-negative");
}

void validate(const ImpostorSet& imp) {
  if (imp.slots.size() != imp.batch_size) {
    throw std::invalid_argument("impostors: " + std::to_string(imp.slots.size()) +
                                " anchors for a batch of " + std::to_string(imp.batch_size));
  }
  for (std::size_t i = 0; i < imp.batch_size; ++i) {
    for (std::size_t s = 0; s < used_slots(imp); ++s) {
      const std::size_t j = imp.slots[i][s];
      if (j >= imp.batch_size || j == i) {
        throw std::invalid_argument("impostors: slot " + std::to_string(s) + " of anchor " +
                                    std::to_string(i) + " holds invalid index " + std::to_string(j));
      }
    }
  }
}

ImpostorSet sample_impostors(std::size_t batch_size, bool trimodal, Rng& rng) {
  if (batch_size < 2) {
    throw std::invalid_argument("sample_impostors: batch size " + std::to_string(batch_size) +
                                " has no impostor candidates (need at least 2)");
  }
  ImpostorSet imp{batch_size, trimodal, {}};
  imp.slots.resize(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    for (std::size_t s = 0; s < used_slots(imp); ++s) {
      const std::size_t draw = rng.below(batch_size - 1);
      imp.slots[i][s] = draw >= i ? draw + 1 : draw;
    }
    for (std::size_t s = used_slots(imp); s < 6; ++s) imp.slots[i][s] = imp.slots[i][s % 2];
  }
  return imp;
}

ImpostorSet sample_impostors(std::size_t batch_size, bool trimodal, std::uint64_t seed) {
  Rng rng(seed);
  return sample_impostors(batch_size, trimodal, rng);
}

ImpostorSet hardest_impostors(std::size_t batch_size, std::span<const double> s_ia,
                              std::span<const double> s_it, std::span<const double> s_ta) {
  if (batch_size < 2) throw std::invalid_argument("hardest_impostors: batch size must be at least 2");
  const std::size_t bb = batch_size * batch_size;
  const bool trimodal = !s_it.empty() || !s_ta.empty();
  if (s_ia.size() != bb || (trimodal && (s_it.size() != bb || s_ta.size() != bb))) {
    throw std::invalid_argument("hardest_impostors: similarity matrices must be B x B");
  }
  ImpostorSet imp{batch_size, trimodal, {}};
  imp.slots.resize(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    auto& s = imp.slots[i];
    s[kAudioForImage] = argmax_excluding(s_ia, batch_size, i, true, i);
    s[kImageForAudio] = argmax_excluding(s_ia, batch_size, i, false, i);
    if (trimodal) {
      s[kTextForImage] = argmax_excluding(s_it, batch_size, i, true, i);
      s[kImageForText] = argmax_excluding(s_it, batch_size, i, false, i);
      s[kAudioForText] = argmax_excluding(s_ta, batch_size, i, true, i);
      s[kTextForAudio] = argmax_excluding(s_ta, batch_size, i, false, i);
    } else {
      for (std::size_t k = 2; k < 6; ++k) s[k] = s[k % 2];
    }
  }
  return imp;
}

Tensor pair_ranking_loss(const PairSimilarity& s, const ImpostorSet& imp,
                         std::size_t first_slot, double eta) {
  validate(imp);
  if (!(eta >= 0.0)) throw std::invalid_argument("ranking loss: eta must be non-negative");
  std::vector<Tensor> terms;
  terms.reserve(imp.batch_size);
  for (std::size_t i = 0; i < imp.batch_size; ++i) {
    const Tensor positive = s(i, i);
    const Tensor right_impostor = s(i, imp.slots[i][first_slot]);
    const Tensor left_impostor = s(imp.slots[i][first_slot + 1], i);
    terms.push_back(hinge(add_scalar(right_impostor - positive, eta)) +
                    hinge(add_scalar(left_impostor - positive, eta)));
  }
  return add_n(terms);
}

Tensor bimodal_loss(const PairSimilarity& s_ia, const ImpostorSet& imp, double eta) {
  return pair_ranking_loss(s_ia, imp, kAudioForImage, eta);
}

LossBreakdown trimodal_loss(const PairSimilarity& s_ia, const PairSimilarity& s_it,
                            const PairSimilarity& s_ta, const ImpostorSet& imp, double eta) {
  if (!imp.trimodal) throw std::invalid_argument("trimodal_loss: impostor set lacks text slots");
  LossBreakdown out;
  out.image_audio = pair_ranking_loss(s_ia, imp, kAudioForImage, eta);
  out.image_text = pair_ranking_loss(s_it, imp, kTextForImage, eta);
  out.text_audio = pair_ranking_loss(s_ta, imp, kAudioForText, eta);
  out.total = out.image_audio + out.image_text + out.text_audio;
  return out;
}

Tensor bimodal_loss(const Minibatch& batch, const ImpostorSet& imp, const MarginConfig& cfg) {
  check_batch(batch, false);
  check_modes(cfg, false);
  if (imp.batch_size != batch.size()) throw std::invalid_argument("bimodal_loss: impostor/batch size mismatch");
  return bimodal_loss(
      [&](std::size_t a, std::size_t b) { return similarity(batch.images[a], batch.audio[b], cfg.image_audio); },
      imp, cfg.eta);
}

LossBreakdown trimodal_loss(const Minibatch& batch, const ImpostorSet& imp,
                            const MarginConfig& cfg) {
  check_batch(batch, true);
  check_modes(cfg, true);
  if (imp.batch_size != batch.size()) throw std::invalid_argument("trimodal_loss: impostor/batch size mismatch");
  return trimodal_loss(
      [&](std::size_t a, std::size_t b) { return similarity(batch.images[a], batch.audio[b], cfg.image_audio); },
      [&](std::size_t a, std::size_t b) { return similarity(batch.images[a], batch.text[b], cfg.image_text); },
      [&](std::size_t a, std::size_t b) { return similarity(batch.text[a], batch.audio[b], cfg.text_audio); },
      imp, cfg.eta);
}

}  // namespace trimodal
