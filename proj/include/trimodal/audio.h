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
#include <filesystem>
#include <vector>

#include "trimodal/tensor.h"

namespace trimodal {

struct Waveform {
  std::vector<double> samples;  // nominally in [-1, 1]
  int sample_rate = 16000;
};

// Windowed frames, row-major [n_frames, frame_length].
struct FrameMatrix {
  std::vector<double> data;
  std::size_t n_frames = 0;
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  int sample_rate = 16000;

  std::span<const double> frame(std::size_t i) const {
    return std::span<const double>(data).subspan(i * frame_length, frame_length);
  }
};

struct MelConfig {
  std::size_t n_mels = 40;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 selects the Nyquist frequency
  double floor_epsilon = 1e-10;
};

struct LogMelSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  std::vector<double> values;  // row-major [n_frames, n_mels]
  double frame_shift_s = 0.0;
  double frame_length_s = 0.0;

  double at(std::size_t frame, std::size_t band) const {
    return values[frame * n_mels + band];
  }
  // [n_frames, n_mels] tensor without grad.
  Tensor to_tensor() const;
};

// Symmetric Hamming window 0.54 - 0.46 cos(2 pi n / (len - 1)).
std::vector<double> hamming_window(std::size_t length);

// Frame i covers samples [i*hop, i*hop + win), multiplied by the window.
FrameMatrix frame_signal(const Waveform& wave, double window_s = 0.025,
                         double hop_s = 0.010);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filter bank over the bins of an n_fft-point DFT. Filters are
// equally spaced on the mel scale between f_min and f_max.
class MelFilterBank {
 public:
  MelFilterBank(std::size_t n_fft, int sample_rate, const MelConfig& cfg);

  std::size_t n_mels() const { return centers_hz_.size(); }
  std::size_t n_bins() const { return n_bins_; }
  const std::vector<double>& centers_hz() const { return centers_hz_; }
  // Band edges in Hz, n_mels + 2 entries.
  const std::vector<double>& edges_hz() const { return edges_hz_; }
  double weight(std::size_t band, std::size_t bin) const {
    return weights_[band * n_bins_ + bin];
  }
  std::vector<double> apply(std::span<const double> magnitude) const;

 private:
  std::size_t n_bins_;
  std::vector<double> edges_hz_;
  std::vector<double> centers_hz_;
  std::vector<double> weights_;
};

std::size_t next_pow2(std::size_t n);

// |X[k]| for k = 0..n_fft/2 of the zero-padded frame (radix-2 FFT).
std::vector<double> magnitude_spectrum(std::span<const double> frame, std::size_t n_fft);

// Per frame: magnitude spectrum, mel filter bank, log(energy + floor_epsilon).
LogMelSpectrogram log_mel(const FrameMatrix& frames, const MelConfig& cfg = {});

// Headerless little-endian signed 16-bit mono PCM.
Waveform read_pcm16(const std::filesystem::path& path, int sample_rate);
void write_pcm16(const std::filesystem::path& path, const Waveform& wave);

Waveform make_tone(double freq_hz, double duration_s, int sample_rate = 16000,
                   double amplitude = 0.5);

}  // namespace trimodal
