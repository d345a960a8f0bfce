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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trimodal/archive.h"
#include "trimodal/encoders.h"

namespace trimodal {

struct ActionAnnotation {
  std::string video_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::string language = "en";
};

struct NarrationAnnotation {
  std::string video_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

// Lowercased suffix stripping (-ing, -ed, -es, -s); stems keep >= 3 chars.
std::string stem(std::string_view token);
// Lowercased alphanumeric tokens, articles removed, each stemmed.
std::vector<std::string> stemmed_tokens(std::string_view text);

enum class MatchRule { kNone, kExact, kStemmedSet, kInclusion };

const char* match_rule_name(MatchRule r);

// First rule that links the two strings: exact equality, equal stemmed
// token sets, or the narration's stemmed tokens appearing contiguously in
// the action's.
MatchRule match_rule(std::string_view action_text, std::string_view narration_text);

struct AlignedPair {
  ActionAnnotation action;
  NarrationAnnotation narration;
  MatchRule rule = MatchRule::kNone;
};

struct AlignmentResult {
  std::vector<AlignedPair> pairs;
  std::size_t unmatched_actions = 0;
  std::size_t unmatched_narrations = 0;
};

/// Greedy monotone alignment per video: narrations are visited in start-time
/// order and each takes the earliest unused action after the previous match
/// that satisfies a match rule. Every annotation is used at most once.
AlignmentResult align_actions_narrations(const std::vector<ActionAnnotation>& actions,
                                         const std::vector<NarrationAnnotation>& narrations);

std::vector<ActionAnnotation> filter_language(const std::vector<ActionAnnotation>& actions,
                                              std::string_view language);

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split parse_split(std::string_view name);

// Train: the interior `train_frames` of train_frames + 2 equally spaced
// positions, round(i (F-1) / (N+1)) for i = 1..N. Val/test: the middle frame
// floor((F-1)/2).
std::vector<std::size_t> select_frames(std::size_t frame_count, Split split,
                                       std::size_t train_frames = 5);

struct TimeSpan {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SpanRules {
  double lead_s = 0.3;
  double max_length_s = 3.0;
  double min_length_s = 0.1;
};

// Shifts the start earlier by lead_s (not below 0), caps the length at
// max_length_s, and rejects (nullopt) spans shorter than min_length_s.
std::optional<TimeSpan> adjust_narration_span(double start_s, double end_s,
                                              const SpanRules& rules = {});

struct TupleRecord {
  std::string id;
  Split split = Split::kTrain;
  std::string group;      // concept id (synthetic) or clip id (prepared)
  std::string image_ref;  // "<payload file>:<tensor>" or "<video>@<frame>"
  std::string audio_ref;  // "<payload file>:<tensor>" or "<video>:<start>-<end>"
  TokenSequence tokens;
};

// One record per line, tab-separated: id, split, group, image_ref,
// audio_ref, space-joined token ids.
std::string format_manifest(const std::vector<TupleRecord>& records);
std::vector<TupleRecord> parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& path, const std::vector<TupleRecord>& records);
std::vector<TupleRecord> read_manifest(const std::filesystem::path& path);

// Splits "<file>:<tensor>" references.
std::pair<std::string, std::string> split_payload_ref(std::string_view ref);

// Tab-separated annotation tables, one row per line; blank lines and lines
// starting with '#' are skipped. Actions: video_id, start_s, end_s, text and
// an optional language tag (default "en"). Narrations: video_id, start_s,
// end_s, text.
std::vector<ActionAnnotation> parse_actions(std::string_view text);
std::vector<NarrationAnnotation> parse_narrations(std::string_view text);

struct PrepConfig {
  std::string language = "en";
  double fps = 60.0;  // video frame rate used to index frames
  double val_fraction = 0.04;
  double test_fraction = 0.04;
  std::size_t train_frames = 5;
  SpanRules spans;
  std::uint64_t seed = 0;  // clip-to-split shuffle
};

struct PrepReport {
  std::size_t actions = 0;
  std::size_t narrations = 0;
  std::size_t dropped_language = 0;
  std::size_t unmatched_actions = 0;
  std::size_t unmatched_narrations = 0;
  std::size_t dropped_short_spans = 0;
  std::size_t clips = 0;
  std::size_t train_records = 0;
  std::size_t val_records = 0;
  std::size_t test_records = 0;
};

struct PreparedCorpus {
  std::vector<TupleRecord> records;
  std::vector<std::string> vocabulary;  // token id -> word
  PrepReport report;
};

/// Language filter, alignment and span adjustment, then a seeded clip-level
/// split and frame selection. Image refs are "<video>@<frame>" with absolute
/// frame numbers, audio refs "<video>:<start>-<end>" in seconds, and tokens
/// index the sorted vocabulary of lowercased action words.
PreparedCorpus prepare_corpus(const std::vector<ActionAnnotation>& actions,
                              const std::vector<NarrationAnnotation>& narrations,
                              const PrepConfig& cfg = {});
// "key=value" lines.
std::string format_prep_report(const PrepReport& report);

struct SyntheticConfig {
  std::size_t n_concepts = 50;
  std::size_t n_train = 400;
  std::size_t n_val = 50;
  std::size_t grid_rows = 2;
  std::size_t grid_cols = 2;
  std::size_t audio_length = 8;      // encoder output frames N_a
  std::size_t feature_dim = 16;      // image channels == mel bands
  std::size_t cell_pixels = 8;       // image pixels per grid cell side
  std::size_t frames_per_step = 4;   // spectrogram frames per encoder frame
  std::size_t min_span_frames = 4;
  std::size_t max_span_frames = 8;
  std::size_t filler_vocab = 8;
  std::size_t filler_tokens = 2;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

void validate(const SyntheticConfig& cfg);

struct PlantedLocation {
  std::size_t concept_id = 0;
  std::size_t cell_row = 0;
  std::size_t cell_col = 0;
  std::size_t span_start = 0;  // spectrogram frames
  std::size_t span_length = 0;
};

struct SyntheticSplit {
  std::vector<TupleRecord> records;
  std::vector<PlantedLocation> planted;
  TensorArchive payload;  // "<id>.image" [H, W, F], "<id>.audio" [T, F]
};

struct SyntheticCorpus {
  SyntheticSplit train;
  SyntheticSplit val;
  std::size_t vocab_size = 0;
  std::vector<std::vector<double>> signatures;  // one per concept
};

/// Each record draws a concept; its signature vector fills one random grid
/// cell of the image and a random contiguous span of audio frames, and its
/// tokens contain the concept's token id among filler tokens. Every other
/// image pixel and audio frame is N(0, noise_sigma^2). Validation records
/// use pairwise distinct concepts.
SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& cfg);

// Writes train.tsv, val.tsv, train.tmck and val.tmck under `dir`.
void write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus);

}  // namespace trimodal
