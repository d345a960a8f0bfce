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

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "trimodal/config.h"

using namespace trimodal;

namespace {

std::string error_of(auto fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults are valid") {
  const TrainConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  CHECK(mode_triple(cfg) == "SIMA/SIMT/STMA");
  CHECK(cfg.schedule.decay_every == 70);
}

TEST_CASE("format and parse round trip") {
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.margin.eta = 0.3;
  cfg.schedule.base_lr = 1.0 / 3.0;
  cfg.margin.image_audio.pooling = Pooling::kMISA;
  cfg.image_channels = {4, 6};
  cfg.trimodal = false;
  cfg.seed = 123456789012345ull;
  const std::string text = format_config(cfg);
  TrainConfig back;
  apply_config_text(back, text);
  CHECK(format_config(back) == text);
  CHECK(back.schedule.base_lr == cfg.schedule.base_lr);
  CHECK(back.margin.eta == 0.3);
  CHECK(back.image_channels == std::vector<std::size_t>{4, 6});
  CHECK_FALSE(back.trimodal);
  for (const std::string& key : config_keys()) CHECK(text.find(key + "=") != std::string::npos);
}

TEST_CASE("comments, blanks and whitespace") {
  TrainConfig cfg;
  apply_config_text(cfg, "# header\n\n  epochs = 3  # trailing\r\nnormalize=yes\nimage_channels = 2, 3 ,4\n");
  CHECK(cfg.epochs == 3);
  CHECK(cfg.margin.text_audio.normalize);
  CHECK(cfg.image_channels == std::vector<std::size_t>{2, 3, 4});
}

TEST_CASE("errors name the key and line") {
  TrainConfig cfg;
  CHECK(error_of([&] { apply_config_key(cfg, "epoch", "3"); }).find("'epoch'") != std::string::npos);
  CHECK(error_of([&] { apply_config_text(cfg, "epochs=1\n\nbatch_size=two\n"); }).find("line 3") !=
        std::string::npos);
  CHECK(error_of([&] { apply_config_text(cfg, "epochs\n"); }).find("line 1") != std::string::npos);
  CHECK_THROWS_AS(apply_config_key(cfg, "eta", "1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_key(cfg, "epochs", "-1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_key(cfg, "trimodal", "maybe"), std::invalid_argument);
  CHECK_THROWS(apply_config_key(cfg, "mode_ia", "SUMA"));
  CHECK_THROWS(apply_config_key(cfg, "image_channels", "4,,2"));
}

TEST_CASE("validation catches inconsistent settings") {
  TrainConfig cfg;
  cfg.batch_size = 1;
  CHECK_THROWS(validate(cfg));
  cfg = TrainConfig{};
  cfg.margin.image_audio.pooling = Pooling::kSIMT;
  CHECK_THROWS(validate(cfg));
  cfg = TrainConfig{};
  cfg.momentum = 1.0;
  CHECK_THROWS(validate(cfg));
  cfg = TrainConfig{};
  cfg.schedule.base_lr = 0.0;
  CHECK_THROWS(validate(cfg));
}

TEST_CASE("presets") {
  TrainConfig cfg;
  apply_preset(cfg, "places");
  CHECK(mode_triple(cfg) == "MISA/MIST/STMA");
  CHECK(cfg.batch_size == 80);
  apply_preset(cfg, "epic");
  CHECK(mode_triple(cfg) == "SIMA/SIMT/STMA");
  CHECK(cfg.batch_size == 30);
  CHECK_THROWS_AS(apply_preset(cfg, "kitchen"), std::invalid_argument);
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "trimodal_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "run.cfg") << "epochs=2\nseed=9\n";
    std::ofstream(dir / "bad.cfg") << "epochs=2\nfoo=1\n";
  }
  const TrainConfig cfg = load_config_file(dir / "run.cfg");
  CHECK(cfg.epochs == 2);
  CHECK(cfg.seed == 9);
  const std::string bad = error_of([&] { load_config_file(dir / "bad.cfg"); });
  CHECK(bad.find("bad.cfg") != std::string::npos);
  CHECK(bad.find("line 2") != std::string::npos);
  const std::string missing = error_of([&] { load_config_file(dir / "missing.cfg"); });
  CHECK(missing.find("missing.cfg") != std::string::npos);
  std::filesystem::remove_all(dir);
}
