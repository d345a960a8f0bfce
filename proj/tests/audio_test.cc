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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "trimodal/audio.h"

using namespace trimodal;

namespace {

Waveform noise_wave(std::size_t n, std::uint64_t seed, double amplitude = 0.3) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  Waveform w;
  w.samples.resize(n);
  for (double& s : w.samples) s = dist(gen);
  return w;
}

double hamming(std::size_t n, std::size_t len) {
  return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(len - 1));
}

// Triangle of band b over oracle edges, evaluated at f Hz.
double triangle(const std::vector<double>& edges, std::size_t b, double f) {
  const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
  if (f <= lo || f >= hi) return 0.0;
  return f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
}

}  // namespace

TEST_CASE("one second at 16 kHz gives 98 frames") {
  const FrameMatrix f = frame_signal(Waveform{std::vector<double>(16000, 0.0), 16000});
  CHECK(f.n_frames == 98);
  CHECK(f.frame_length == 400);
  CHECK(f.hop_length == 160);
}

TEST_CASE("frame count formula over random lengths") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> len(400, 40000);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = len(gen);
    const FrameMatrix f = frame_signal(Waveform{std::vector<double>(n, 0.1), 16000});
    CHECK(f.n_frames == oracle::frame_count(n, 400, 160));
  }
}

TEST_CASE("zero and constant signals through the window") {
  const FrameMatrix zero = frame_signal(Waveform{std::vector<double>(1000, 0.0), 16000});
  for (double v : zero.data) CHECK(v == 0.0);
  const FrameMatrix one = frame_signal(Waveform{std::vector<double>(1000, 1.0), 16000});
  for (std::size_t i = 0; i < one.n_frames; ++i) {
    const auto frame = one.frame(i);
    for (std::size_t n = 0; n < frame.size(); ++n) {
      CHECK(frame[n] == doctest::Approx(hamming(n, 400)).epsilon(1e-14));
    }
  }
  const auto window = hamming_window(400);
  CHECK(window.front() == doctest::Approx(0.08));
  CHECK(window[0] == window[399]);
}

TEST_CASE("too-short input is rejected") {
  CHECK_THROWS(frame_signal(Waveform{std::vector<double>(399, 0.0), 16000}));
}

TEST_CASE("mel scale") {
  for (double hz : {0.0, 100.0, 440.0, 1000.0, 8000.0}) {
    CHECK(hz_to_mel(hz) == doctest::Approx(oracle::mel(hz)).epsilon(1e-14));
    CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-12));
  }
  CHECK(next_pow2(400) == 512);
  CHECK(next_pow2(512) == 512);
  CHECK(next_pow2(1) == 1);
}

TEST_CASE("fft magnitude matches direct summation") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> dist;
  std::vector<double> frame(400);
  for (double& v : frame) v = dist(gen);
  const auto got = magnitude_spectrum(frame, 512);
  const auto want = oracle::dft_magnitude(frame, 512);
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(got[k] - want[k]) < 1e-9);
}

TEST_CASE("filter bank centers follow the mel scale") {
  const MelFilterBank bank(512, 16000, MelConfig{});
  const auto centers = oracle::mel_centers(40, 0.0, 8000.0);
  REQUIRE(bank.n_mels() == 40);
  for (std::size_t b = 0; b < 40; ++b) {
    CHECK(bank.centers_hz()[b] == doctest::Approx(centers[b]).epsilon(1e-12));
  }
  CHECK(bank.edges_hz().front() == 0.0);
  CHECK(bank.edges_hz().back() == doctest::Approx(8000.0));
}

TEST_CASE("invalid band edges") {
  const FrameMatrix f = frame_signal(make_tone(440.0, 0.1));
  CHECK_THROWS_AS(log_mel(f, MelConfig{0, 0.0, 0.0, 1e-10}), std::invalid_argument);
  CHECK_THROWS_AS(log_mel(f, MelConfig{40, 4000.0, 2000.0, 1e-10}), std::invalid_argument);
  CHECK_THROWS_AS(log_mel(f, MelConfig{40, 0.0, 9000.0, 1e-10}), std::invalid_argument);
}

TEST_CASE("silence maps to the log floor") {
  const auto spec = log_mel(frame_signal(Waveform{std::vector<double>(16000, 0.0), 16000}));
  CHECK(spec.n_frames == 98);
  CHECK(spec.n_mels == 40);
  CHECK(spec.values.size() == 98 * 40);
  for (double v : spec.values) CHECK(v == std::log(1e-10));
}

TEST_CASE("440 Hz tone lands in the band predicted by a DFT oracle") {
  const Waveform tone = make_tone(440.0, 0.5);
  const FrameMatrix frames = frame_signal(tone);
  const auto spec = log_mel(frames);

  std::vector<double> edges{0.0};
  for (double c : oracle::mel_centers(40, 0.0, 8000.0)) edges.push_back(c);
  edges.push_back(8000.0);

  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    std::vector<double> windowed(400);
    for (std::size_t n = 0; n < 400; ++n) windowed[n] = tone.samples[i * 160 + n] * hamming(n, 400);
    const auto mag = oracle::dft_magnitude(windowed, 512);
    const std::size_t peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
    const double peak_hz = 16000.0 * static_cast<double>(peak) / 512.0;
    std::size_t predicted = 0;
    for (std::size_t b = 1; b < 40; ++b) {
      if (triangle(edges, b, peak_hz) > triangle(edges, predicted, peak_hz)) predicted = b;
    }
    CHECK(edges[predicted] < 440.0);
    CHECK(440.0 < edges[predicted + 2]);

    std::size_t best = 0;
    for (std::size_t b = 1; b < 40; ++b) {
      if (spec.at(i, b) > spec.at(i, best)) best = b;
    }
    CHECK(best == predicted);
  }
}

TEST_CASE("louder signals never lower any cell") {
  const Waveform w = noise_wave(4000, 3);
  Waveform louder = w;
  for (double& s : louder.samples) s *= 1.7;
  const auto a = log_mel(frame_signal(w));
  const auto b = log_mel(frame_signal(louder));
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] >= a.values[i]);
}

TEST_CASE("a one-hop delay shifts rows by one") {
  const Waveform w = noise_wave(4000, 9);
  Waveform delayed;
  delayed.samples.assign(160, 0.0);
  delayed.samples.insert(delayed.samples.end(), w.samples.begin(), w.samples.end());
  const auto a = log_mel(frame_signal(w));
  const auto b = log_mel(frame_signal(delayed));
  REQUIRE(b.n_frames == a.n_frames + 1);
  for (std::size_t i = 0; i < a.n_frames; ++i) {
    for (std::size_t m = 0; m < a.n_mels; ++m) CHECK(std::abs(b.at(i + 1, m) - a.at(i, m)) < 1e-9);
  }
}

TEST_CASE("outputs are finite and above the floor") {
  const auto spec = log_mel(frame_signal(noise_wave(2000, 4, 1.0)));
  for (double v : spec.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= std::log(1e-10));
  }
  CHECK(spec.frame_shift_s == doctest::Approx(0.010));
  CHECK(spec.frame_length_s == doctest::Approx(0.025));
  CHECK(spec.to_tensor().shape() == Shape{spec.n_frames, 40});
}

TEST_CASE("pcm16 round trip") {
  const auto path = std::filesystem::temp_directory_path() / "trimodal_audio_test.pcm";
  Waveform w{{0.0, 0.5, -0.5, -1.0, 32767.0 / 32768.0}, 16000};
  write_pcm16(path, w);
  CHECK(std::filesystem::file_size(path) == 10);
  const Waveform r = read_pcm16(path, 16000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) CHECK(r.samples[i] == w.samples[i]);
  std::filesystem::remove(path);
  CHECK_THROWS(read_pcm16(path, 16000));
}
