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

#include "trimodal/audio.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "trimodal/fileio.h"

namespace trimodal {

namespace {

void fft_in_place(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const std::complex<double> u = a[start + k];
        const std::complex<double> v = a[start + k + len / 2] * w;
        a[start + k] = u + v;
        a[start + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace

Tensor LogMelSpectrogram::to_tensor() const { return Tensor(Shape{n_frames, n_mels}, values); }

std::vector<double> hamming_window(std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
  }
  return w;
}

FrameMatrix frame_signal(const Waveform& wave, double window_s, double hop_s) {
  if (wave.sample_rate <= 0) throw std::invalid_argument("frame_signal: sample rate must be positive");
  const auto win = static_cast<std::size_t>(std::lround(wave.sample_rate * window_s));
  const auto hop = static_cast<std::size_t>(std::lround(wave.sample_rate * hop_s));
  if (win == 0 || hop == 0) {
    throw std::invalid_argument("frame_signal: window and hop must span at least one sample");
  }
  if (wave.samples.size() < win) {
    throw std::invalid_argument("frame_signal: " + std::to_string(wave.samples.size()) +
                                " samples yield no frames (window is " +
                                std::to_string(win) + " samples)");
  }
  FrameMatrix frames;
  frames.n_frames = (wave.samples.size() - win) / hop + 1;
  frames.frame_length = win;
  frames.hop_length = hop;
  frames.sample_rate = wave.sample_rate;
  frames.data.resize(frames.n_frames * win);
  const auto window = hamming_window(win);
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    for (std::size_t n = 0; n < win; ++n) {
      frames.data[i * win + n] = wave.samples[i * hop + n] * window[n];
    }
  }
  return frames;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterBank::MelFilterBank(std::size_t n_fft, int sample_rate, const MelConfig& cfg)
    : n_bins_(n_fft / 2 + 1) {
  const double nyquist = sample_rate / 2.0;
  const double f_max = cfg.f_max == 0.0 ? nyquist : cfg.f_max;
  if (cfg.n_mels == 0) throw std::invalid_argument("log_mel: n_mels must be at least 1");
  if (!(cfg.f_min >= 0.0 && cfg.f_min < f_max && f_max <= nyquist)) {
    throw std::invalid_argument("log_mel: invalid band edges f_min=" + std::to_string(cfg.f_min) +
                                " f_max=" + std::to_string(f_max) +
                                " (Nyquist " + std::to_string(nyquist) + ")");
  }
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(f_max);
  edges_hz_.resize(cfg.n_mels + 2);
  for (std::size_t i = 0; i < edges_hz_.size(); ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(cfg.n_mels + 1);
    edges_hz_[i] = mel_to_hz(mel);
  }
  centers_hz_.assign(edges_hz_.begin() + 1, edges_hz_.end() - 1);
  weights_.assign(cfg.n_mels * n_bins_, 0.0);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges_hz_[m], mid = edges_hz_[m + 1], hi = edges_hz_[m + 2];
    for (std::size_t k = 0; k < n_bins_; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      weights_[m * n_bins_ + k] = w;
    }
  }
}

std::vector<double> MelFilterBank::apply(std::span<const double> magnitude) const {
  if (magnitude.size() != n_bins_) {
    throw std::invalid_argument("mel filter bank: expected " + std::to_string(n_bins_) +
                                " bins, got " + std::to_string(magnitude.size()));
  }
  std::vector<double> energy(n_mels(), 0.0);
  for (std::size_t m = 0; m < n_mels(); ++m) {
    for (std::size_t k = 0; k < n_bins_; ++k) energy[m] += weights_[m * n_bins_ + k] * magnitude[k];
  }
  return energy;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> magnitude_spectrum(std::span<const double> frame, std::size_t n_fft) {
  if (n_fft == 0 || (n_fft & (n_fft - 1)) != 0 || n_fft < frame.size()) {
    throw std::invalid_argument("magnitude_spectrum: n_fft must be a power of two >= frame length");
  }
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft_in_place(buf);
  std::vector<double> mag(n_fft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

LogMelSpectrogram log_mel(const FrameMatrix& frames, const MelConfig& cfg) {
  if (frames.n_frames == 0) throw std::invalid_argument("log_mel: no frames");
  if (!(cfg.floor_epsilon > 0.0)) throw std::invalid_argument("log_mel: floor_epsilon must be positive");
  const std::size_t n_fft = next_pow2(frames.frame_length);
  const MelFilterBank bank(n_fft, frames.sample_rate, cfg);
  LogMelSpectrogram spec;
  spec.n_frames = frames.n_frames;
  spec.n_mels = bank.n_mels();
  spec.frame_shift_s = static_cast<double>(frames.hop_length) / frames.sample_rate;
  spec.frame_length_s = static_cast<double>(frames.frame_length) / frames.sample_rate;
  spec.values.reserve(spec.n_frames * spec.n_mels);
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    for (double e : bank.apply(magnitude_spectrum(frames.frame(i), n_fft))) {
      spec.values.push_back(std::log(e + cfg.floor_epsilon));
    }
  }
  return spec;
}

Waveform read_pcm16(const std::filesystem::path& path, int sample_rate) {
  if (sample_rate <= 0) throw std::invalid_argument("read_pcm16: sample rate must be positive");
  const std::string bytes = read_file(path);
  if (bytes.size() % 2 != 0) {
    throw std::runtime_error("read_pcm16: '" + path.string() + "' has an odd byte count");
  }
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.resize(bytes.size() / 2);
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
    wave.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return wave;
}

void write_pcm16(const std::filesystem::path& path, const Waveform& wave) {
  std::string bytes(wave.samples.size() * 2, '\0');
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    const double clipped = std::clamp(wave.samples[i], -1.0, 32767.0 / 32768.0);
    const auto v = static_cast<std::int16_t>(std::lround(clipped * 32768.0));
    const auto u = static_cast<std::uint16_t>(v);
    bytes[2 * i] = static_cast<char>(u & 0xff);
    bytes[2 * i + 1] = static_cast<char>(u >> 8);
  }
  write_file_atomic(path, bytes);
}

Waveform make_tone(double freq_hz, double duration_s, int sample_rate, double amplitude) {
  Waveform wave;
  wave.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sample_rate));
  wave.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wave.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                           static_cast<double>(i) / sample_rate);
  }
  return wave;
}

}  // namespace trimodal
