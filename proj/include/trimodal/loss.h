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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "trimodal/encoders.h"
#include "trimodal/matchmap.h"
#include "trimodal/random.h"
#include "trimodal/tensor.h"

namespace trimodal {

struct MarginConfig {
  double eta = 1.0;
  SimilarityMode image_audio{Pooling::kSIMA, false};
  SimilarityMode image_text{Pooling::kSIMT, false};
  SimilarityMode text_audio{Pooling::kSTMA, false};
};

void validate(const MarginConfig& cfg);

// Impostor slots per anchor i. Each pair of slots feeds one modality pair:
// the first replaces the right-hand item, the second the left-hand item.
enum ImpostorSlot : std::size_t {
  kAudioForImage = 0,  // S_IA(I_i, A_j)
  kImageForAudio = 1,  // S_IA(I_k, A_i)
  kTextForImage = 2,   // S_IT(I_i, T_l)
  kImageForText = 3,   // S_IT(I_m, T_i)
  kAudioForText = 4,   // S_TA(T_i, A_n)
  kTextForAudio = 5,   // S_TA(T_o, A_i)
};

struct ImpostorSet {
  std::size_t batch_size = 0;
  bool trimodal = false;
  // slots[i][s]; only slots 0-1 are meaningful unless trimodal.
  std::vector<std::array<std::size_t, 6>> slots;
};

// Throws unless every used slot lies in [0, B) and differs from its anchor.
void validate(const ImpostorSet& imp);

// Independent uniform draws from [0, B) \ {i} for every anchor and slot.
ImpostorSet sample_impostors(std::size_t batch_size, bool trimodal, Rng& rng);
ImpostorSet sample_impostors(std::size_t batch_size, bool trimodal, std::uint64_t seed);

// Hardest in-batch negatives from row-major B x B similarity values
// (entry (a, b) = S(left_a, right_b)). Text matrices may be empty when not
// trimodal. Ties go to the lowest index.
ImpostorSet hardest_impostors(std::size_t batch_size, std::span<const double> s_ia,
                              std::span<const double> s_it, std::span<const double> s_ta);

// Similarity between item `left` of one modality and item `right` of another.
using PairSimilarity = std::function<Tensor(std::size_t left, std::size_t right)>;

struct LossBreakdown {
  Tensor total;
  Tensor image_audio;
  Tensor image_text;
  Tensor text_audio;
};

/// Sum over anchors i of
///   hinge(S(L_i, R_a) - S(L_i, R_i) + eta) + hinge(S(L_b, R_i) - S(L_i, R_i) + eta)
/// with a, b the impostors in `first_slot` and `first_slot + 1`.
Tensor pair_ranking_loss(const PairSimilarity& s, const ImpostorSet& imp,
                         std::size_t first_slot, double eta);

// Image-audio terms only.
Tensor bimodal_loss(const PairSimilarity& s_ia, const ImpostorSet& imp, double eta);
// Image-audio, image-text and text-audio terms.
LossBreakdown trimodal_loss(const PairSimilarity& s_ia, const PairSimilarity& s_it,
                            const PairSimilarity& s_ta, const ImpostorSet& imp, double eta);

struct Minibatch {
  std::vector<ImageGridFeatures> images;
  std::vector<SequenceFeatures> audio;
  std::vector<SequenceFeatures> text;  // may be empty for the bimodal loss

  std::size_t size() const { return images.size(); }
};

Tensor bimodal_loss(const Minibatch& batch, const ImpostorSet& imp, const MarginConfig& cfg);
LossBreakdown trimodal_loss(const Minibatch& batch, const ImpostorSet& imp,
                            const MarginConfig& cfg);

}  // namespace trimodal
