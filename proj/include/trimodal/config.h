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
#include <string>
#include <string_view>
#include <vector>

#include "trimodal/loss.h"
#include "trimodal/optim.h"

namespace trimodal {

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 20;
  MarginConfig margin;
  ScheduleConfig schedule{0.001, 10.0, 70};
  double momentum = 0.9;
  bool trimodal = true;
  bool hard_negatives = false;
  bool freeze_text = true;
  std::size_t emb_size = 16;
  std::vector<std::size_t> image_channels = {16, 16, 32};
  std::size_t audio_hidden = 32;
  std::size_t audio_kernel = 5;
  std::size_t vocab_size = 0;  // 0 infers max token id + 1 from the data
  std::uint64_t seed = 0;
  std::size_t eval_every = 0;  // 0 evaluates after the final epoch only
};

void validate(const TrainConfig& cfg);

// Every key accepted by apply_config_key, in a fixed order.
const std::vector<std::string>& config_keys();

// Throws std::invalid_argument for unknown keys or unparsable values.
void apply_config_key(TrainConfig& cfg, std::string_view key, std::string_view value);

// Flat "key=value" lines; '#' starts a comment; blank lines are ignored.
void apply_config_text(TrainConfig& cfg, std::string_view text);
TrainConfig load_config_file(const std::filesystem::path& path);
std::string format_config(const TrainConfig& cfg);

// "epic": SIMA/SIMT/STMA with batch 30; "places": MISA/MIST/STMA with batch 80.
void apply_preset(TrainConfig& cfg, std::string_view preset);

std::string mode_triple(const TrainConfig& cfg);

}  // namespace trimodal
