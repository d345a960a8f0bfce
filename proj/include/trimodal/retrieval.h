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
#include <string>
#include <utility>
#include <vector>

#include "trimodal/encoders.h"
#include "trimodal/matchmap.h"

namespace trimodal {

// B x B scores; entry (i, j) = similarity(query_i, target_j).
struct SimilarityMatrix {
  std::size_t size = 0;
  std::vector<double> values;  // row-major
  Modality row_modality = Modality::kImage;
  Modality col_modality = Modality::kAudio;
  Pooling mode = Pooling::kSIMA;

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
  SimilarityMatrix transposed() const;
};

// Image-query ranks the columns of each row (images retrieve audio);
// audio-query ranks the rows of each column (audio retrieves images).
enum class QueryDirection { kImageQuery, kAudioQuery };

const char* direction_name(QueryDirection d);

struct RecallReport {
  QueryDirection direction = QueryDirection::kImageQuery;
  std::size_t size = 0;
  std::vector<std::pair<std::size_t, double>> recall;  // (K, fraction)

  double at_k(std::size_t k) const;
};

SimilarityMatrix similarity_matrix(const std::vector<ImageGridFeatures>& images,
                                   const std::vector<SequenceFeatures>& sequences,
                                   const SimilarityMode& mode);
SimilarityMatrix similarity_matrix(const std::vector<SequenceFeatures>& text,
                                   const std::vector<SequenceFeatures>& audio,
                                   const SimilarityMode& mode);

// 0-based position of target `truth` when the candidates are sorted by
// descending score with ties kept in index order.
std::size_t rank_of(std::span<const double> scores, std::size_t truth);

// Fraction of queries whose paired item ranks within the top k.
double recall_at_k(const SimilarityMatrix& s, std::size_t k, QueryDirection direction);

// Recall at each requested K; K larger than the matrix is evaluated at its size.
RecallReport recall_report(const SimilarityMatrix& s, QueryDirection direction,
                           const std::vector<std::size_t>& ks);

}  // namespace trimodal
