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

#include "trimodal/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trimodal/fileio.h"
#include "trimodal/random.h"

namespace trimodal {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool contains_contiguous(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string padded(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", n);
  return buf;
}

}  // namespace

std::string stem(std::string_view token) {
  std::string t = lowercase(token);
  for (std::string_view suffix : {"ing", "ed", "es", "s"}) {
    if (t.size() >= suffix.size() + 3 && t.ends_with(suffix)) {
      t.resize(t.size() - suffix.size());
      break;
    }
  }
  return t;
}

std::vector<std::string> stemmed_tokens(std::string_view text) {
  static const std::set<std::string> kArticles = {"a", "an", "the"};
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !kArticles.contains(current)) out.push_back(stem(current));
    current.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

const char* match_rule_name(MatchRule r) {
  switch (r) {
    case MatchRule::kNone: return "none";
    case MatchRule::kExact: return "exact";
    case MatchRule::kStemmedSet: return "stemmed_set";
    case MatchRule::kInclusion: return "inclusion";
  }
  return "?";
}

MatchRule match_rule(std::string_view action_text, std::string_view narration_text) {
  if (lowercase(trim(action_text)) == lowercase(trim(narration_text))) return MatchRule::kExact;
  const auto action = stemmed_tokens(action_text);
  const auto narration = stemmed_tokens(narration_text);
  if (narration.empty()) return MatchRule::kNone;
  if (std::set<std::string>(action.begin(), action.end()) ==
      std::set<std::string>(narration.begin(), narration.end())) {
    return MatchRule::kStemmedSet;
  }
  if (contains_contiguous(action, narration)) return MatchRule::kInclusion;
  return MatchRule::kNone;
}

AlignmentResult align_actions_narrations(const std::vector<ActionAnnotation>& actions,
                                         const std::vector<NarrationAnnotation>& narrations) {
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> videos;
  for (std::size_t i = 0; i < actions.size(); ++i) videos[actions[i].video_id].first.push_back(i);
  for (std::size_t i = 0; i < narrations.size(); ++i) videos[narrations[i].video_id].second.push_back(i);

  AlignmentResult result;
  for (auto& [video, lists] : videos) {
    auto& [acts, nars] = lists;
    std::stable_sort(acts.begin(), acts.end(), [&](std::size_t a, std::size_t b) {
      return actions[a].start_s < actions[b].start_s;
    });
    std::stable_sort(nars.begin(), nars.end(), [&](std::size_t a, std::size_t b) {
      return narrations[a].start_s < narrations[b].start_s;
    });
    std::size_t next = 0;
    std::size_t matched = 0;
    for (std::size_t n : nars) {
      for (std::size_t a = next; a < acts.size(); ++a) {
        const MatchRule rule = match_rule(actions[acts[a]].text, narrations[n].text);
        if (rule == MatchRule::kNone) continue;
        result.pairs.push_back({actions[acts[a]], narrations[n], rule});
        next = a + 1;
        ++matched;
        break;
      }
    }
    result.unmatched_actions += acts.size() - matched;
    result.unmatched_narrations += nars.size() - matched;
  }
  return result;
}

std::vector<ActionAnnotation> filter_language(const std::vector<ActionAnnotation>& actions,
                                              std::string_view language) {
  std::vector<ActionAnnotation> out;
  std::copy_if(actions.begin(), actions.end(), std::back_inserter(out),
               [&](const ActionAnnotation& a) { return a.language == language; });
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(name) + "' (expected train, val or test)");
}

std::vector<std::size_t> select_frames(std::size_t frame_count, Split split,
                                       std::size_t train_frames) {
  if (frame_count < 1) throw std::invalid_argument("select_frames: clip has no frames");
  if (split != Split::kTrain) return {(frame_count - 1) / 2};
  if (train_frames == 0) throw std::invalid_argument("select_frames: train_frames must be positive");
  std::vector<std::size_t> out;
  const double step = static_cast<double>(frame_count - 1) / static_cast<double>(train_frames + 1);
  for (std::size_t i = 1; i <= train_frames; ++i) {
    out.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(i) * step)));
  }
  return out;
}

std::optional<TimeSpan> adjust_narration_span(double start_s, double end_s, const SpanRules& rules) {
  if (!(start_s < end_s)) {
    throw std::invalid_argument("adjust_narration_span: start " + std::to_string(start_s) +
                                " is not before end " + std::to_string(end_s));
  }
  TimeSpan span;
  span.start_s = std::max(0.0, start_s - rules.lead_s);
  span.end_s = end_s - span.start_s > rules.max_length_s ? span.start_s + rules.max_length_s : end_s;
  if (span.end_s - span.start_s < rules.min_length_s) return std::nullopt;
  return span;
}

std::string format_manifest(const std::vector<TupleRecord>& records) {
  std::string out;
  for (const TupleRecord& r : records) {
    out += r.id + '\t' + split_name(r.split) + '\t' + r.group + '\t' + r.image_ref + '\t' +
           r.audio_ref + '\t';
    for (std::size_t i = 0; i < r.tokens.ids.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(r.tokens.ids[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<TupleRecord> parse_manifest(std::string_view text) {
  std::vector<TupleRecord> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (const std::string& raw : split_on(text, '\n')) {
    ++line_no;
    if (raw.empty()) continue;
    const auto fields = split_on(raw, '\t');
    if (fields.size() != 6) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": expected 6 fields, got " +
                               std::to_string(fields.size()));
    }
    TupleRecord r;
    r.id = fields[0];
    r.split = parse_split(fields[1]);
    r.group = fields[2];
    r.image_ref = fields[3];
    r.audio_ref = fields[4];
    std::istringstream tokens(fields[5]);
    std::string tok;
    while (tokens >> tok) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || tok[0] == '-') {
        throw std::runtime_error("manifest line " + std::to_string(line_no) + ": bad token id '" + tok + "'");
      }
      r.tokens.ids.push_back(static_cast<std::size_t>(v));
    }
    if (!ids.insert(r.id).second) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<TupleRecord>& records) {
  write_file_atomic(path, format_manifest(records));
}

std::vector<TupleRecord> read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::pair<std::string, std::string> split_payload_ref(std::string_view ref) {
  const std::size_t colon = ref.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == ref.size()) {
    throw std::invalid_argument("payload reference '" + std::string(ref) + "' is not <file>:<tensor>");
  }
  return {std::string(ref.substr(0, colon)), std::string(ref.substr(colon + 1))};
}

namespace {

double parse_seconds(const std::string& field, std::size_t line_no, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || !std::isfinite(v)) {
    throw std::runtime_error(std::string(what) + " line " + std::to_string(line_no) +
                             ": bad time '" + field + "'");
  }
  return v;
}

// Rows of at least `min_fields` tab-separated fields, with line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> table_rows(
    std::string_view text, std::size_t min_fields, std::size_t max_fields, const char* what) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 0;
  for (std::string line : split_on(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto fields = split_on(line, '\t');
    if (fields.size() < min_fields || fields.size() > max_fields) {
      throw std::runtime_error(std::string(what) + " line " + std::to_string(line_no) + ": expected " +
                               std::to_string(min_fields) +
                               (min_fields == max_fields ? "" : "-" + std::to_string(max_fields)) +
                               " fields, got " + std::to_string(fields.size()));
    }
    rows.emplace_back(line_no, std::move(fields));
  }
  return rows;
}

std::string seconds_str(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{lowercase(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

std::vector<ActionAnnotation> parse_actions(std::string_view text) {
  std::vector<ActionAnnotation> out;
  for (auto& [line_no, f] : table_rows(text, 4, 5, "actions")) {
    ActionAnnotation a;
    a.video_id = f[0];
    a.start_s = parse_seconds(f[1], line_no, "actions");
    a.end_s = parse_seconds(f[2], line_no, "actions");
    a.text = f[3];
    if (f.size() == 5) a.language = trim(f[4]);
    if (!(a.start_s < a.end_s)) {
      throw std::runtime_error("actions line " + std::to_string(line_no) + ": start must precede end");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<NarrationAnnotation> parse_narrations(std::string_view text) {
  std::vector<NarrationAnnotation> out;
  for (auto& [line_no, f] : table_rows(text, 4, 4, "narrations")) {
    NarrationAnnotation n;
    n.video_id = f[0];
    n.start_s = parse_seconds(f[1], line_no, "narrations");
    n.end_s = parse_seconds(f[2], line_no, "narrations");
    n.text = f[3];
    if (!(n.start_s < n.end_s)) {
      throw std::runtime_error("narrations line " + std::to_string(line_no) + ": start must precede end");
    }
    out.push_back(std::move(n));
  }
  return out;
}

PreparedCorpus prepare_corpus(const std::vector<ActionAnnotation>& actions,
                              const std::vector<NarrationAnnotation>& narrations,
                              const PrepConfig& cfg) {
  if (!(cfg.fps > 0.0)) throw std::invalid_argument("prep: fps must be positive");
  if (!(cfg.val_fraction >= 0.0 && cfg.test_fraction >= 0.0 &&
        cfg.val_fraction + cfg.test_fraction <= 1.0)) {
    throw std::invalid_argument("prep: split fractions must be non-negative and sum to at most 1");
  }
  PreparedCorpus out;
  PrepReport& rep = out.report;
  rep.actions = actions.size();
  rep.narrations = narrations.size();
  const auto kept = filter_language(actions, cfg.language);
  rep.dropped_language = actions.size() - kept.size();
  const AlignmentResult aligned = align_actions_narrations(kept, narrations);
  rep.unmatched_actions = aligned.unmatched_actions;
  rep.unmatched_narrations = aligned.unmatched_narrations;

  struct Clip {
    const AlignedPair* pair;
    TimeSpan span;
  };
  std::vector<Clip> clips;
  std::set<std::string> vocab;
  for (const AlignedPair& p : aligned.pairs) {
    const auto span = adjust_narration_span(p.narration.start_s, p.narration.end_s, cfg.spans);
    if (!span) {
      ++rep.dropped_short_spans;
      continue;
    }
    clips.push_back({&p, *span});
    for (const std::string& w : words(p.action.text)) vocab.insert(w);
  }
  rep.clips = clips.size();
  out.vocabulary.assign(vocab.begin(), vocab.end());

  std::vector<Split> split(clips.size(), Split::kTrain);
  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  rng.shuffle(order.begin(), order.end());
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * clips.size()));
  const auto n_val = std::min(clips.size() - n_test,
                              static_cast<std::size_t>(std::llround(cfg.val_fraction * clips.size())));
  for (std::size_t i = 0; i < n_test; ++i) split[order[i]] = Split::kTest;
  for (std::size_t i = n_test; i < n_test + n_val; ++i) split[order[i]] = Split::kVal;

  for (std::size_t c = 0; c < clips.size(); ++c) {
    const ActionAnnotation& a = clips[c].pair->action;
    TokenSequence tokens;
    for (const std::string& w : words(a.text)) {
      tokens.ids.push_back(static_cast<std::size_t>(
          std::lower_bound(out.vocabulary.begin(), out.vocabulary.end(), w) - out.vocabulary.begin()));
    }
    if (tokens.ids.empty()) continue;
    const auto first = static_cast<std::size_t>(std::floor(a.start_s * cfg.fps));
    const auto last = static_cast<std::size_t>(std::floor(a.end_s * cfg.fps));
    const std::size_t frames = std::max<std::size_t>(1, last - first);
    const auto picks = select_frames(frames, split[c], cfg.train_frames);
    const std::string clip_id = "clip-" + padded(c + 1);
    for (std::size_t k = 0; k < picks.size(); ++k) {
      TupleRecord r;
      r.id = picks.size() == 1 ? clip_id : clip_id + "-f" + std::to_string(k);
      r.split = split[c];
      r.group = clip_id;
      r.image_ref = a.video_id + "@" + std::to_string(first + picks[k]);
      r.audio_ref = a.video_id + ":" + seconds_str(clips[c].span.start_s) + "-" +
                    seconds_str(clips[c].span.end_s);
      r.tokens = tokens;
      switch (r.split) {
        case Split::kTrain: ++rep.train_records; break;
        case Split::kVal: ++rep.val_records; break;
        case Split::kTest: ++rep.test_records; break;
      }
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

std::string format_prep_report(const PrepReport& r) {
  std::ostringstream out;
  out << "actions=" << r.actions << "\n"
      << "narrations=" << r.narrations << "\n"
      << "dropped_language=" << r.dropped_language << "\n"
      << "unmatched_actions=" << r.unmatched_actions << "\n"
      << "unmatched_narrations=" << r.unmatched_narrations << "\n"
      << "dropped_short_spans=" << r.dropped_short_spans << "\n"
      << "clips=" << r.clips << "\n"
      << "train_records=" << r.train_records << "\n"
      << "val_records=" << r.val_records << "\n"
      << "test_records=" << r.test_records << "\n";
  return out.str();
}

void validate(const SyntheticConfig& cfg) {
  if (cfg.n_concepts == 0 || cfg.n_train == 0 || cfg.n_val == 0) {
    throw std::invalid_argument("synthetic corpus: concept and record counts must be positive");
  }
  if (cfg.n_val > cfg.n_concepts) {
    throw std::invalid_argument("synthetic corpus: " + std::to_string(cfg.n_val) +
                                " validation records need as many distinct concepts, only " +
                                std::to_string(cfg.n_concepts) + " available");
  }
  if (cfg.grid_rows == 0 || cfg.grid_cols == 0 || cfg.audio_length == 0 || cfg.feature_dim == 0 ||
      cfg.cell_pixels == 0 || cfg.frames_per_step == 0) {
    throw std::invalid_argument("synthetic corpus: payload dimensions must be positive");
  }
  const std::size_t frames = cfg.audio_length * cfg.frames_per_step;
  if (cfg.min_span_frames == 0 || cfg.min_span_frames > cfg.max_span_frames ||
      cfg.min_span_frames > frames) {
    throw std::invalid_argument("synthetic corpus: invalid planted span length range");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw std::invalid_argument("synthetic corpus: noise_sigma must be >= 0");
}

namespace {

void make_record(const SyntheticConfig& cfg, const std::vector<std::vector<double>>& signatures,
                 Split split, std::size_t index, std::size_t concept_id, Rng& rng,
                 SyntheticSplit& out) {
  const std::string id = std::string(split_name(split)) + "-" + padded(index);
  const std::string file = std::string(split_name(split)) + ".tmck";
  const std::size_t f = cfg.feature_dim;
  const auto& sig = signatures[concept_id];

  PlantedLocation loc;
  loc.concept_id = concept_id;
  loc.cell_row = rng.below(cfg.grid_rows);
  loc.cell_col = rng.below(cfg.grid_cols);
  const std::size_t h = cfg.grid_rows * cfg.cell_pixels;
  const std::size_t w = cfg.grid_cols * cfg.cell_pixels;
  std::vector<double> image(h * w * f);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const bool planted = y / cfg.cell_pixels == loc.cell_row && x / cfg.cell_pixels == loc.cell_col;
      for (std::size_t c = 0; c < f; ++c) {
        const double noise = cfg.noise_sigma * rng.normal();
        image[(y * w + x) * f + c] = planted ? sig[c] : noise;
      }
    }
  }

  const std::size_t frames = cfg.audio_length * cfg.frames_per_step;
  const std::size_t max_len = std::min(cfg.max_span_frames, frames);
  loc.span_length = cfg.min_span_frames + rng.below(max_len - cfg.min_span_frames + 1);
  loc.span_start = rng.below(frames - loc.span_length + 1);
  std::vector<double> audio(frames * f);
  for (std::size_t t = 0; t < frames; ++t) {
    const bool planted = t >= loc.span_start && t < loc.span_start + loc.span_length;
    for (std::size_t c = 0; c < f; ++c) {
      const double noise = cfg.noise_sigma * rng.normal();
      audio[t * f + c] = planted ? sig[c] : noise;
    }
  }

  TupleRecord record;
  record.id = id;
  record.split = split;
  record.group = "concept-" + std::to_string(concept_id);
  record.image_ref = file + ":" + id + ".image";
  record.audio_ref = file + ":" + id + ".audio";
  const std::size_t slot = rng.below(cfg.filler_tokens + 1);
  for (std::size_t p = 0; p <= cfg.filler_tokens; ++p) {
    record.tokens.ids.push_back(p == slot ? concept_id
                                          : cfg.n_concepts + rng.below(std::max<std::size_t>(cfg.filler_vocab, 1)));
  }

  out.payload.add(id + ".image", Shape{h, w, f}, std::move(image));
  out.payload.add(id + ".audio", Shape{frames, f}, std::move(audio));
  out.records.push_back(std::move(record));
  out.planted.push_back(loc);
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& cfg) {
  validate(cfg);
  if (cfg.filler_tokens > 0 && cfg.filler_vocab == 0) {
    throw std::invalid_argument("synthetic corpus: filler tokens need a filler vocabulary");
  }
  Rng rng(cfg.seed);
  SyntheticCorpus corpus;
  corpus.vocab_size = cfg.n_concepts + cfg.filler_vocab;
  corpus.signatures.resize(cfg.n_concepts, std::vector<double>(cfg.feature_dim));
  for (auto& sig : corpus.signatures) {
    for (double& v : sig) v = rng.normal();
  }
  std::vector<std::size_t> val_concepts(cfg.n_concepts);
  std::iota(val_concepts.begin(), val_concepts.end(), 0);
  rng.shuffle(val_concepts.begin(), val_concepts.end());
  val_concepts.resize(cfg.n_val);

  for (std::size_t i = 0; i < cfg.n_train; ++i) {
    make_record(cfg, corpus.signatures, Split::kTrain, i, rng.below(cfg.n_concepts), rng, corpus.train);
  }
  for (std::size_t i = 0; i < cfg.n_val; ++i) {
    make_record(cfg, corpus.signatures, Split::kVal, i, val_concepts[i], rng, corpus.val);
  }
  return corpus;
}

void write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
  std::filesystem::create_directories(dir);
  corpus.train.payload.save(dir / "train.tmck");
  corpus.val.payload.save(dir / "val.tmck");
  write_manifest(dir / "train.tsv", corpus.train.records);
  write_manifest(dir / "val.tsv", corpus.val.records);
}

}  // namespace trimodal
