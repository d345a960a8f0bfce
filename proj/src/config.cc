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

#include "trimodal/config.h"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "trimodal/fileio.h"

namespace trimodal {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw std::invalid_argument("config: key '" + std::string(key) + "' expects " + expected +
                              ", got '" + std::string(value) + "'");
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a number");
  }
  if (used != s.size()) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const auto item = strip(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 2) throw std::invalid_argument("config: batch_size must be at least 2");
  if (cfg.emb_size == 0) throw std::invalid_argument("config: emb_size must be positive");
  if (cfg.image_channels.empty()) throw std::invalid_argument("config: image_channels must be non-empty");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw std::invalid_argument("config: momentum must lie in [0, 1)");
  validate(cfg.margin);
  validate(cfg.schedule);
  if (pooling_pair(cfg.margin.image_audio.pooling) != ModalityPair::kImageAudio) {
    throw std::invalid_argument("config: mode_ia must be SIMA or MISA");
  }
  if (pooling_pair(cfg.margin.image_text.pooling) != ModalityPair::kImageText) {
    throw std::invalid_argument("config: mode_it must be SIMT or MIST");
  }
  if (pooling_pair(cfg.margin.text_audio.pooling) != ModalityPair::kTextAudio) {
    throw std::invalid_argument("config: mode_ta must be STMA");
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "epochs",       "batch_size",     "eta",          "mode_ia",      "mode_it",
      "mode_ta",      "normalize",      "base_lr",      "decay_ratio",  "decay_every",
      "momentum",     "trimodal",       "hard_negatives", "freeze_text", "emb_size",
      "image_channels", "audio_hidden", "audio_kernel", "vocab_size",   "seed",
      "eval_every"};
  return keys;
}

void apply_config_key(TrainConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view v = strip(raw);
  if (key == "epochs") cfg.epochs = parse_uint(key, v);
  else if (key == "batch_size") cfg.batch_size = parse_uint(key, v);
  else if (key == "eta") cfg.margin.eta = parse_double(key, v);
  else if (key == "mode_ia") cfg.margin.image_audio.pooling = parse_pooling(v);
  else if (key == "mode_it") cfg.margin.image_text.pooling = parse_pooling(v);
  else if (key == "mode_ta") cfg.margin.text_audio.pooling = parse_pooling(v);
  else if (key == "normalize") {
    const bool on = parse_bool(key, v);
    cfg.margin.image_audio.normalize = on;
    cfg.margin.image_text.normalize = on;
    cfg.margin.text_audio.normalize = on;
  }
  else if (key == "base_lr") cfg.schedule.base_lr = parse_double(key, v);
  else if (key == "decay_ratio") cfg.schedule.decay_ratio = parse_double(key, v);
  else if (key == "decay_every") cfg.schedule.decay_every = parse_uint(key, v);
  else if (key == "momentum") cfg.momentum = parse_double(key, v);
  else if (key == "trimodal") cfg.trimodal = parse_bool(key, v);
  else if (key == "hard_negatives") cfg.hard_negatives = parse_bool(key, v);
  else if (key == "freeze_text") cfg.freeze_text = parse_bool(key, v);
  else if (key == "emb_size") cfg.emb_size = parse_uint(key, v);
  else if (key == "image_channels") cfg.image_channels = parse_list(key, v);
  else if (key == "audio_hidden") cfg.audio_hidden = parse_uint(key, v);
  else if (key == "audio_kernel") cfg.audio_kernel = parse_uint(key, v);
  else if (key == "vocab_size") cfg.vocab_size = parse_uint(key, v);
  else if (key == "seed") cfg.seed = parse_uint(key, v);
  else if (key == "eval_every") cfg.eval_every = parse_uint(key, v);
  else throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

void apply_config_text(TrainConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_config_key(cfg, strip(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

TrainConfig load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("config file '" + path.string() + "' does not exist");
  }
  TrainConfig cfg;
  try {
    apply_config_text(cfg, read_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return cfg;
}

std::string format_config(const TrainConfig& cfg) {
  std::string channels;
  for (std::size_t i = 0; i < cfg.image_channels.size(); ++i) {
    if (i) channels += ",";
    channels += std::to_string(cfg.image_channels[i]);
  }
  std::ostringstream out;
  out << "epochs=" << cfg.epochs << "\n"
      << "batch_size=" << cfg.batch_size << "\n"
      << "eta=" << fmt_double(cfg.margin.eta) << "\n"
      << "mode_ia=" << pooling_name(cfg.margin.image_audio.pooling) << "\n"
      << "mode_it=" << pooling_name(cfg.margin.image_text.pooling) << "\n"
      << "mode_ta=" << pooling_name(cfg.margin.text_audio.pooling) << "\n"
      << "normalize=" << (cfg.margin.image_audio.normalize ? "true" : "false") << "\n"
      << "base_lr=" << fmt_double(cfg.schedule.base_lr) << "\n"
      << "decay_ratio=" << fmt_double(cfg.schedule.decay_ratio) << "\n"
      << "decay_every=" << cfg.schedule.decay_every << "\n"
      << "momentum=" << fmt_double(cfg.momentum) << "\n"
      << "trimodal=" << (cfg.trimodal ? "true" : "false") << "\n"
      << "hard_negatives=" << (cfg.hard_negatives ? "true" : "false") << "\n"
      << "freeze_text=" << (cfg.freeze_text ? "true" : "false") << "\n"
      << "emb_size=" << cfg.emb_size << "\n"
      << "image_channels=" << channels << "\n"
      << "audio_hidden=" << cfg.audio_hidden << "\n"
      << "audio_kernel=" << cfg.audio_kernel << "\n"
      << "vocab_size=" << cfg.vocab_size << "\n"
      << "seed=" << cfg.seed << "\n"
      << "eval_every=" << cfg.eval_every << "\n";
  return out.str();
}

void apply_preset(TrainConfig& cfg, std::string_view preset) {
  if (preset == "epic") {
    cfg.margin.image_audio.pooling = Pooling::kSIMA;
    cfg.margin.image_text.pooling = Pooling::kSIMT;
    cfg.margin.text_audio.pooling = Pooling::kSTMA;
    cfg.batch_size = 30;
  } else if (preset == "places") {
    cfg.margin.image_audio.pooling = Pooling::kMISA;
    cfg.margin.image_text.pooling = Pooling::kMIST;
    cfg.margin.text_audio.pooling = Pooling::kSTMA;
    cfg.batch_size = 80;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(preset) + "' (expected epic or places)");
  }
}

std::string mode_triple(const TrainConfig& cfg) {
  return std::string(pooling_name(cfg.margin.image_audio.pooling)) + "/" +
         pooling_name(cfg.margin.image_text.pooling) + "/" + pooling_name(cfg.margin.text_audio.pooling);
}

}  // namespace trimodal
