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

#include "trimodal/matchmap.h"

#include <stdexcept>

#include "trimodal/ops.h"

namespace trimodal {

const char* pair_name(ModalityPair p) {
  switch (p) {
    case ModalityPair::kImageAudio: return "image-audio";
    case ModalityPair::kImageText: return "image-text";
    case ModalityPair::kTextAudio: return "text-audio";
  }
  return "?";
}

const char* pooling_name(Pooling p) {
  switch (p) {
    case Pooling::kSIMA: return "SIMA";
    case Pooling::kMISA: return "MISA";
    case Pooling::kSIMT: return "SIMT";
    case Pooling::kMIST: return "MIST";
    case Pooling::kSTMA: return "STMA";
  }
  return "?";
}

Pooling parse_pooling(std::string_view name) {
  for (Pooling p : {Pooling::kSIMA, Pooling::kMISA, Pooling::kSIMT, Pooling::kMIST, Pooling::kSTMA}) {
    if (name == pooling_name(p)) return p;
  }
  throw std::invalid_argument("unknown similarity mode '" + std::string(name) +
                              "' (expected SIMA, MISA, SIMT, MIST or STMA)");
}

ModalityPair pooling_pair(Pooling p) {
  switch (p) {
    case Pooling::kSIMA:
    case Pooling::kMISA: return ModalityPair::kImageAudio;
    case Pooling::kSIMT:
    case Pooling::kMIST: return ModalityPair::kImageText;
    case Pooling::kSTMA: return ModalityPair::kTextAudio;
  }
  return ModalityPair::kImageAudio;
}

Tensor matchmap_values(const Tensor& x, const Tensor& y, bool normalize) {
  const std::size_t d = x.shape().back();
  if (y.shape().back() != d) {
    throw std::invalid_argument("compute_matchmap: embedding dimensions differ (" +
                                std::to_string(d) + " vs " + std::to_string(y.shape().back()) + ")");
  }
  const std::size_t p = x.numel() / d;
  const std::size_t q = y.numel() / d;
  Tensor xf = reshape(x, {p, d});
  Tensor yf = reshape(y, {q, d});
  if (normalize) {
    xf = normalize_rows(xf);
    yf = normalize_rows(yf);
  }
  Shape out(x.shape().begin(), x.shape().end() - 1);
  out.insert(out.end(), y.shape().begin(), y.shape().end() - 1);
  return reshape(matmul(xf, yf, true), std::move(out));
}

Matchmap compute_matchmap(const ImageGridFeatures& image, const SequenceFeatures& seq,
                          bool normalize) {
  if (seq.modality == Modality::kImage) {
    throw std::invalid_argument("compute_matchmap: right operand must be audio or text");
  }
  Matchmap m;
  m.values = matchmap_values(image.grid, seq.seq, normalize);
  m.pair = seq.modality == Modality::kAudio ? ModalityPair::kImageAudio : ModalityPair::kImageText;
  m.left_locations = image.rows() * image.cols();
  m.right_locations = seq.length();
  return m;
}

Matchmap compute_matchmap(const SequenceFeatures& text, const SequenceFeatures& audio,
                          bool normalize) {
  if (text.modality != Modality::kText || audio.modality != Modality::kAudio) {
    throw std::invalid_argument(std::string("compute_matchmap: expected text x audio, got ") +
                                modality_name(text.modality) + " x " + modality_name(audio.modality));
  }
  Matchmap m;
  m.values = matchmap_values(text.seq, audio.seq, normalize);
  m.pair = ModalityPair::kTextAudio;
  m.left_locations = text.length();
  m.right_locations = audio.length();
  return m;
}

Tensor pool_similarity(const Matchmap& m, Pooling pooling) {
  if (pooling_pair(pooling) != m.pair) {
    throw std::invalid_argument(std::string("pool_similarity: ") + pooling_name(pooling) +
                                " does not apply to a " + pair_name(m.pair) + " matchmap");
  }
  const Tensor flat = reshape(m.values, {m.left_locations, m.right_locations});
  switch (pooling) {
    case Pooling::kSIMA:
    case Pooling::kSIMT:
    case Pooling::kSTMA:
      // Max over the right operand's locations, mean over the left's.
      return mean(max_reduce(flat, 1));
    case Pooling::kMISA:
    case Pooling::kMIST:
      return mean(max_reduce(flat, 0));
  }
  throw std::logic_error("pool_similarity: unhandled pooling");
}

Tensor similarity(const ImageGridFeatures& image, const SequenceFeatures& seq,
                  const SimilarityMode& mode) {
  return pool_similarity(compute_matchmap(image, seq, mode.normalize), mode.pooling);
}

Tensor similarity(const SequenceFeatures& text, const SequenceFeatures& audio,
                  const SimilarityMode& mode) {
  return pool_similarity(compute_matchmap(text, audio, mode.normalize), mode.pooling);
}

}  // namespace trimodal
