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

#include "trimodal/retrieval.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace trimodal {

namespace {

template <typename Left, typename Right>
SimilarityMatrix build(const std::vector<Left>& left, const std::vector<Right>& right,
                       const SimilarityMode& mode, Modality row, Modality col) {
  if (left.size() != right.size()) {
    throw std::invalid_argument("similarity_matrix: " + std::to_string(left.size()) + " queries vs " +
                                std::to_string(right.size()) + " targets");
  }
  if (left.empty()) throw std::invalid_argument("similarity_matrix: empty evaluation set");
  NoGradGuard no_grad;
  SimilarityMatrix s;
  s.size = left.size();
  s.values.resize(s.size * s.size);
  s.row_modality = row;
  s.col_modality = col;
  s.mode = mode.pooling;
  for (std::size_t i = 0; i < s.size; ++i) {
    for (std::size_t j = 0; j < s.size; ++j) {
      s.values[i * s.size + j] = similarity(left[i], right[j], mode).item();
    }
  }
  return s;
}

}  // namespace

SimilarityMatrix SimilarityMatrix::transposed() const {
  SimilarityMatrix t = *this;
  std::swap(t.row_modality, t.col_modality);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) t.values[j * size + i] = values[i * size + j];
  }
  return t;
}

const char* direction_name(QueryDirection d) {
  return d == QueryDirection::kImageQuery ? "image_query" : "audio_query";
}

double RecallReport::at_k(std::size_t k) const {
  for (const auto& [kk, r] : recall) {
    if (kk == k) return r;
  }
  throw std::out_of_range("recall report has no entry for K=" + std::to_string(k));
}

SimilarityMatrix similarity_matrix(const std::vector<ImageGridFeatures>& images,
                                   const std::vector<SequenceFeatures>& sequences,
                                   const SimilarityMode& mode) {
  const Modality col = sequences.empty() ? Modality::kAudio : sequences.front().modality;
  return build(images, sequences, mode, Modality::kImage, col);
}

SimilarityMatrix similarity_matrix(const std::vector<SequenceFeatures>& text,
                                   const std::vector<SequenceFeatures>& audio,
                                   const SimilarityMode& mode) {
  return build(text, audio, mode, Modality::kText, Modality::kAudio);
}

std::size_t rank_of(std::span<const double> scores, std::size_t truth) {
  const double t = scores[truth];
  std::size_t rank = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > t || (scores[j] == t && j < truth)) ++rank;
  }
  return rank;
}

double recall_at_k(const SimilarityMatrix& s, std::size_t k, QueryDirection direction) {
  if (k < 1 || k > s.size) {
    throw std::invalid_argument("recall_at_k: K=" + std::to_string(k) + " outside [1, " +
                                std::to_string(s.size) + "]");
  }
  std::vector<double> scores(s.size);
  std::size_t hits = 0;
  for (std::size_t q = 0; q < s.size; ++q) {
    for (std::size_t c = 0; c < s.size; ++c) {
      scores[c] = direction == QueryDirection::kImageQuery ? s.at(q, c) : s.at(c, q);
    }
    if (rank_of(scores, q) < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(s.size);
}

RecallReport recall_report(const SimilarityMatrix& s, QueryDirection direction,
                           const std::vector<std::size_t>& ks) {
  RecallReport report{direction, s.size, {}};
  for (std::size_t k : ks) {
    if (k == 0) throw std::invalid_argument("recall_report: K must be positive");
    report.recall.emplace_back(k, recall_at_k(s, std::min(k, s.size), direction));
  }
  return report;
}

}  // namespace trimodal
