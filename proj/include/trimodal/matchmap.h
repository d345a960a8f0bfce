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

#include <string>
#include <string_view>

#include "trimodal/encoders.h"
#include "trimodal/tensor.h"

namespace trimodal {

enum class ModalityPair { kImageAudio, kImageText, kTextAudio };

const char* pair_name(ModalityPair p);

// Matchmap pooling functions. The first letter pair names the reduction over
// the left operand's locations, the second over the right operand's:
//   SIMA  mean over image cells of the max over audio frames
//   MISA  mean over audio frames of the max over image cells
//   SIMT  mean over image cells of the max over words
//   MIST  mean over words of the max over image cells
//   STMA  mean over words of the max over audio frames
enum class Pooling { kSIMA, kMISA, kSIMT, kMIST, kSTMA };

const char* pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);
ModalityPair pooling_pair(Pooling p);

struct SimilarityMode {
  Pooling pooling = Pooling::kSIMA;
  // Cosine (L2-normalized vectors) instead of the raw inner product.
  bool normalize = false;
};

/// Inner products between every localized vector of the left operand and
/// every localized vector of the right one. Shape is the left's location
/// axes followed by the right's: image x audio is [rows, cols, frames],
/// image x text [rows, cols, words], text x audio [words, frames].
struct Matchmap {
  Tensor values;
  ModalityPair pair = ModalityPair::kImageAudio;
  std::size_t left_locations = 0;
  std::size_t right_locations = 0;
};

// Generic form over [..., d] tensors: entry (p, q) = <x[p], y[q]>, with both
// vectors unit-normalized first when `normalize` (zero vectors give 0).
Tensor matchmap_values(const Tensor& x, const Tensor& y, bool normalize);

// Image x audio or image x text, per the sequence's modality tag.
Matchmap compute_matchmap(const ImageGridFeatures& image, const SequenceFeatures& seq,
                          bool normalize = false);
// Text x audio. The first argument must be text, the second audio.
Matchmap compute_matchmap(const SequenceFeatures& text, const SequenceFeatures& audio,
                          bool normalize = false);

// Scalar [1] similarity; throws if the pooling does not fit the matchmap.
Tensor pool_similarity(const Matchmap& m, Pooling pooling);

Tensor similarity(const ImageGridFeatures& image, const SequenceFeatures& seq,
                  const SimilarityMode& mode);
Tensor similarity(const SequenceFeatures& text, const SequenceFeatures& audio,
                  const SimilarityMode& mode);

}  // namespace trimodal
