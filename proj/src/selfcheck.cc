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

#include "trimodal/selfcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "trimodal/encoders.h"
#include "trimodal/loss.h"
#include "trimodal/ops.h"
#include "trimodal/random.h"

namespace trimodal {

namespace {

Tensor random_tensor(Shape shape, Rng& rng, bool requires_grad, const std::string& name) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.normal();
  Tensor t(std::move(shape), std::move(v), requires_grad);
  t.set_name(name);
  return t;
}

struct GradCase {
  std::string name;
  std::vector<Tensor> inputs;
  std::function<Tensor()> forward;
  std::size_t max_coords = 0;
};

std::vector<GradCase> primitive_cases(Rng& rng) {
  std::vector<GradCase> cases;
  {
    Tensor x = random_tensor({3, 4}, rng, true, "x");
    Tensor y = random_tensor({3, 4}, rng, true, "y");
    cases.push_back({"add_mul_sub", {x, y}, [=] { return sum(x * y + x * 2.0 - y); }});
  }
  {
    Tensor x = random_tensor({3, 4}, rng, true, "x");
    cases.push_back({"mean_sum", {x}, [=] { return mean(x * x) + sum(x); }});
  }
  {
    Tensor a = random_tensor({3, 4}, rng, true, "a");
    Tensor b = random_tensor({4, 5}, rng, true, "b");
    Tensor bt = random_tensor({5, 4}, rng, true, "bt");
    Tensor r = random_tensor({3, 5}, rng, false, "r");
    cases.push_back({"matmul", {a, b}, [=] { return dot(matmul(a, b), r); }});
    cases.push_back({"matmul_transposed", {a, bt}, [=] { return dot(matmul(a, bt, true), r); }});
  }
  {
    Tensor x = random_tensor({4, 5}, rng, true, "x");
    Tensor r = random_tensor({4, 5}, rng, false, "r");
    cases.push_back({"relu", {x}, [=] { return dot(relu(x), r); }});
    cases.push_back({"hinge", {x}, [=] { return sum(hinge(x + 0.5)); }});
    cases.push_back({"normalize_rows", {x}, [=] { return dot(normalize_rows(x), r); }});
  }
  {
    Tensor x = random_tensor({4, 5}, rng, true, "x");
    Tensor r0 = random_tensor({5}, rng, false, "r0");
    Tensor r1 = random_tensor({4}, rng, false, "r1");
    cases.push_back({"max_reduce", {x}, [=] {
                       return dot(max_reduce(x, 0), r0) + dot(max_reduce(x, 1), r1);
                     }});
  }
  {
    Tensor table = random_tensor({5, 3}, rng, true, "table");
    Tensor r = random_tensor({3, 3}, rng, false, "r");
    cases.push_back({"gather_rows", {table}, [=] {
                       const std::size_t ids[] = {1, 3, 1};
                       return dot(gather_rows(table, ids), r);
                     }});
  }
  {
    Tensor x = random_tensor({5, 6, 2}, rng, true, "x");
    Tensor w = random_tensor({3, 3, 2, 3}, rng, true, "w");
    Tensor b = random_tensor({3}, rng, true, "b");
    Tensor r = random_tensor({5, 6, 3}, rng, false, "r");
    cases.push_back({"conv2d", {x, w, b}, [=] { return dot(conv2d(x, w, b), r); }});
  }
  {
    Tensor x = random_tensor({4, 6, 2}, rng, true, "x");
    Tensor r = random_tensor({2, 3, 2}, rng, false, "r");
    cases.push_back({"maxpool2d", {x}, [=] { return dot(maxpool2d(x), r); }});
  }
  {
    Tensor x = random_tensor({7, 3}, rng, true, "x");
    Tensor w = random_tensor({3, 3, 2}, rng, true, "w");
    Tensor b = random_tensor({2}, rng, true, "b");
    Tensor r = random_tensor({7, 2}, rng, false, "r");
    Tensor rp = random_tensor({3, 3}, rng, false, "rp");
    cases.push_back({"conv1d", {x, w, b}, [=] { return dot(conv1d(x, w, b), r); }});
    cases.push_back({"maxpool1d", {x}, [=] { return dot(maxpool1d(x), rp); }});
  }
  return cases;
}

std::vector<GradCase> matchmap_cases(Rng& rng) {
  std::vector<GradCase> cases;
  {
    Tensor grid = random_tensor({4, 4, 8}, rng, true, "image");
    Tensor pos = random_tensor({4, 8}, rng, true, "audio_pos");
    Tensor neg = random_tensor({4, 8}, rng, true, "audio_neg");
    cases.push_back({"matchmap_sima_hinge", {grid, pos, neg}, [=] {
                       const ImageGridFeatures img{grid};
                       const SimilarityMode m{Pooling::kSIMA, false};
                       const Tensor sp = similarity(img, SequenceFeatures{pos, Modality::kAudio}, m);
                       const Tensor sn = similarity(img, SequenceFeatures{neg, Modality::kAudio}, m);
                       return hinge(sn - sp + 20.0);
                     }});
  }
  for (Pooling p : {Pooling::kSIMA, Pooling::kMISA, Pooling::kSIMT, Pooling::kMIST,
                    Pooling::kSTMA}) {
    for (bool normalize : {false, true}) {
      const ModalityPair pair = pooling_pair(p);
      Tensor left = pair == ModalityPair::kTextAudio ? random_tensor({3, 5}, rng, true, "text")
                                                     : random_tensor({2, 3, 5}, rng, true, "image");
      Tensor right = random_tensor({4, 5}, rng, true,
                                   pair == ModalityPair::kImageText ? "text" : "audio");
      const Modality right_mod = pair == ModalityPair::kImageText ? Modality::kText : Modality::kAudio;
      std::string name = std::string("pool_") + pooling_name(p) + (normalize ? "_cosine" : "");
      cases.push_back({name, {left, right}, [=] {
                         const SimilarityMode m{p, normalize};
                         const SequenceFeatures r{right, right_mod};
                         if (pair == ModalityPair::kTextAudio) {
                           return similarity(SequenceFeatures{left, Modality::kText}, r, m);
                         }
                         return similarity(ImageGridFeatures{left}, r, m);
                       }});
    }
  }
  return cases;
}

std::vector<GradCase> loss_cases(Rng& rng) {
  const std::size_t b = 3;
  std::vector<Tensor> inputs;
  Minibatch batch;
  for (std::size_t i = 0; i < b; ++i) {
    batch.images.push_back({random_tensor({2, 2, 4}, rng, true, "image" + std::to_string(i))});
    batch.audio.push_back({random_tensor({3, 4}, rng, true, "audio" + std::to_string(i)), Modality::kAudio});
    batch.text.push_back({random_tensor({2, 4}, rng, true, "text" + std::to_string(i)), Modality::kText});
    inputs.push_back(batch.images.back().grid);
    inputs.push_back(batch.audio.back().seq);
    inputs.push_back(batch.text.back().seq);
  }
  const ImpostorSet imp = sample_impostors(b, true, rng);
  MarginConfig cfg;
  cfg.eta = 4.0;
  std::vector<Tensor> bimodal_inputs;
  for (const Tensor& t : inputs) {
    if (t.name().rfind("text", 0) != 0) bimodal_inputs.push_back(t);
  }
  std::vector<GradCase> cases;
  cases.push_back({"bimodal_loss", bimodal_inputs, [=] { return bimodal_loss(batch, imp, cfg); }});
  cases.push_back({"trimodal_loss", inputs, [=] { return trimodal_loss(batch, imp, cfg).total; }});
  return cases;
}

GradCase encoder_case(Rng& rng) {
  const std::size_t b = 3;
  const std::uint64_t seed = rng.next();
  auto image = std::make_shared<ImageEncoder>(ImageEncoderConfig{2, {3, 3}, 4}, derive_seed(seed, 1));
  auto audio = std::make_shared<AudioEncoder>(AudioEncoderConfig{3, 4, 3, 4}, derive_seed(seed, 2));
  auto text = std::make_shared<TextEncoder>(TextEncoderConfig{6, 4, false}, derive_seed(seed, 3));
  std::vector<Tensor> images, spectrograms;
  std::vector<TokenSequence> tokens;
  for (std::size_t i = 0; i < b; ++i) {
    images.push_back(random_tensor({8, 8, 2}, rng, false, "pixels"));
    spectrograms.push_back(random_tensor({8, 3}, rng, false, "spectrogram"));
    tokens.push_back({{rng.below(6), rng.below(6)}});
  }
  const ImpostorSet imp = sample_impostors(b, true, rng);
  std::vector<Tensor> params = image->parameters();
  for (const Tensor& t : audio->parameters()) params.push_back(t);
  for (const Tensor& t : text->parameters()) params.push_back(t);
  return {"encoders_trimodal_loss", params, [=] {
            Minibatch batch;
            for (std::size_t i = 0; i < b; ++i) {
              batch.images.push_back(image->encode(images[i]));
              batch.audio.push_back(audio->encode(spectrograms[i]));
              batch.text.push_back(text->encode(tokens[i]));
            }
            MarginConfig cfg;
            cfg.eta = 4.0;
            return trimodal_loss(batch, imp, cfg).total;
          },
          12};
}

}  // namespace

std::vector<GradSuiteLine> gradient_suite(std::uint64_t seed, const GradCheckOptions& options) {
  Rng rng(seed);
  std::vector<GradCase> cases = primitive_cases(rng);
  for (auto& c : matchmap_cases(rng)) cases.push_back(std::move(c));
  for (auto& c : loss_cases(rng)) cases.push_back(std::move(c));
  cases.push_back(encoder_case(rng));

  std::vector<GradSuiteLine> lines;
  for (GradCase& c : cases) {
    GradCheckOptions opts = options;
    opts.seed = derive_seed(seed, lines.size());
    if (c.max_coords != 0 &&
        (opts.max_coords_per_input == 0 || opts.max_coords_per_input > c.max_coords)) {
      opts.max_coords_per_input = c.max_coords;
    }
    lines.push_back({c.name, check_gradients(c.forward, c.inputs, opts)});
  }
  return lines;
}

std::vector<double> reference_matchmap(const std::vector<double>& x, std::size_t nx,
                                       const std::vector<double>& y, std::size_t ny,
                                       std::size_t d, bool normalize) {
  auto norm = [d](const std::vector<double>& v, std::size_t row) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += v[row * d + k] * v[row * d + k];
    return std::sqrt(s);
  };
  std::vector<double> m(nx * ny, 0.0);
  for (std::size_t p = 0; p < nx; ++p) {
    for (std::size_t q = 0; q < ny; ++q) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += x[p * d + k] * y[q * d + k];
      if (normalize) {
        const double n = norm(x, p) * norm(y, q);
        s = n > 0.0 ? s / n : 0.0;
      }
      m[p * ny + q] = s;
    }
  }
  return m;
}

double reference_pool(const std::vector<double>& m, std::size_t nx, std::size_t ny,
                      bool mean_over_left) {
  const std::size_t outer = mean_over_left ? nx : ny;
  const std::size_t inner = mean_over_left ? ny : nx;
  double total = 0.0;
  for (std::size_t a = 0; a < outer; ++a) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < inner; ++b) {
      best = std::max(best, mean_over_left ? m[a * ny + b] : m[b * ny + a]);
    }
    total += best;
  }
  return total / static_cast<double>(outer);
}

namespace {

struct Raw {
  std::vector<double> v;
  std::size_t n = 0;
};

Raw raw_of(const Tensor& t, std::size_t d) {
  return {std::vector<double>(t.values().begin(), t.values().end()), t.numel() / d};
}

bool mean_over_left(Pooling p) {
  return p == Pooling::kSIMA || p == Pooling::kSIMT || p == Pooling::kSTMA;
}

double reference_similarity(const Raw& x, const Raw& y, std::size_t d, const SimilarityMode& m) {
  return reference_pool(reference_matchmap(x.v, x.n, y.v, y.n, d, m.normalize), x.n, y.n,
                        mean_over_left(m.pooling));
}

double max_abs_diff(std::span<const double> a, const std::vector<double>& b) {
  double worst = a.size() == b.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

std::vector<OracleSuiteLine> oracle_suite(std::uint64_t seed, std::size_t instances) {
  Rng rng(seed);
  std::vector<OracleSuiteLine> lines = {{"matchmap", 0, 0.0},     {"matchmap_cosine", 0, 0.0},
                                        {"SIMA", 0, 0.0},         {"MISA", 0, 0.0},
                                        {"SIMT", 0, 0.0},         {"MIST", 0, 0.0},
                                        {"STMA", 0, 0.0},         {"bimodal_loss", 0, 0.0},
                                        {"trimodal_loss", 0, 0.0}};
  auto note = [&lines](std::size_t line, double dev) {
    lines[line].max_deviation = std::max(lines[line].max_deviation, dev);
  };
  auto dim = [&rng](std::size_t hi) { return 1 + rng.below(hi); };

  for (std::size_t it = 0; it < instances; ++it) {
    const std::size_t d = dim(8);
    const ImageGridFeatures image{random_tensor({dim(6), dim(6), d}, rng, false, "image")};
    const SequenceFeatures audio{random_tensor({dim(6), d}, rng, false, "audio"), Modality::kAudio};
    const SequenceFeatures text{random_tensor({dim(6), d}, rng, false, "text"), Modality::kText};
    const Raw ri = raw_of(image.grid, d), ra = raw_of(audio.seq, d), rt = raw_of(text.seq, d);
    for (bool normalize : {false, true}) {
      const std::size_t line = normalize ? 1 : 0;
      note(line, max_abs_diff(compute_matchmap(image, audio, normalize).values.values(),
                              reference_matchmap(ri.v, ri.n, ra.v, ra.n, d, normalize)));
      note(line, max_abs_diff(compute_matchmap(image, text, normalize).values.values(),
                              reference_matchmap(ri.v, ri.n, rt.v, rt.n, d, normalize)));
      note(line, max_abs_diff(compute_matchmap(text, audio, normalize).values.values(),
                              reference_matchmap(rt.v, rt.n, ra.v, ra.n, d, normalize)));
      ++lines[line].instances;
    }
    const Pooling modes[] = {Pooling::kSIMA, Pooling::kMISA, Pooling::kSIMT, Pooling::kMIST,
                             Pooling::kSTMA};
    for (std::size_t k = 0; k < 5; ++k) {
      const Pooling p = modes[k];
      for (bool normalize : {false, true}) {
        const SimilarityMode m{p, normalize};
        double got = 0.0, want = 0.0;
        switch (pooling_pair(p)) {
          case ModalityPair::kImageAudio:
            got = similarity(image, audio, m).item();
            want = reference_similarity(ri, ra, d, m);
            break;
          case ModalityPair::kImageText:
            got = similarity(image, text, m).item();
            want = reference_similarity(ri, rt, d, m);
            break;
          case ModalityPair::kTextAudio:
            got = similarity(text, audio, m).item();
            want = reference_similarity(rt, ra, d, m);
            break;
        }
        note(2 + k, std::abs(got - want));
      }
      ++lines[2 + k].instances;
    }
  }

  const std::size_t loss_instances = std::max<std::size_t>(1, instances / 5);
  for (std::size_t it = 0; it < loss_instances; ++it) {
    const std::size_t b = 2 + rng.below(4);
    const std::size_t d = dim(6);
    const double eta = rng.uniform(0.0, 3.0);
    MarginConfig cfg;
    cfg.eta = eta;
    cfg.image_audio.normalize = cfg.image_text.normalize = cfg.text_audio.normalize = rng.below(2) == 1;
    Minibatch batch;
    std::vector<Raw> ri, ra, rt;
    const Shape grid{dim(3), dim(3), d};
    for (std::size_t i = 0; i < b; ++i) {
      batch.images.push_back({random_tensor(grid, rng, false, "image")});
      batch.audio.push_back({random_tensor({dim(4), d}, rng, false, "audio"), Modality::kAudio});
      batch.text.push_back({random_tensor({dim(4), d}, rng, false, "text"), Modality::kText});
      ri.push_back(raw_of(batch.images.back().grid, d));
      ra.push_back(raw_of(batch.audio.back().seq, d));
      rt.push_back(raw_of(batch.text.back().seq, d));
    }
    const ImpostorSet imp = sample_impostors(b, true, rng);
    auto hinge_sum = [&](const std::vector<Raw>& l, const std::vector<Raw>& r,
                         const SimilarityMode& m, std::size_t slot) {
      double total = 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        const double pos = reference_similarity(l[i], r[i], d, m);
        const double s1 = reference_similarity(l[i], r[imp.slots[i][slot]], d, m);
        const double s2 = reference_similarity(l[imp.slots[i][slot + 1]], r[i], d, m);
        total += std::max(0.0, s1 - pos + eta) + std::max(0.0, s2 - pos + eta);
      }
      return total;
    };
    const double ia = hinge_sum(ri, ra, cfg.image_audio, kAudioForImage);
    const double it_ = hinge_sum(ri, rt, cfg.image_text, kTextForImage);
    const double ta = hinge_sum(rt, ra, cfg.text_audio, kAudioForText);
    note(7, std::abs(bimodal_loss(batch, imp, cfg).item() - ia));
    note(8, std::abs(trimodal_loss(batch, imp, cfg).total.item() - (ia + it_ + ta)));
    ++lines[7].instances;
    ++lines[8].instances;
  }
  return lines;
}

}  // namespace trimodal
