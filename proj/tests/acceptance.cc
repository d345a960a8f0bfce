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

// End-to-end acceptance suite: prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "test_util.h"
#include "trimodal/audio.h"
#include "trimodal/corpus.h"
#include "trimodal/loss.h"
#include "trimodal/matchmap.h"
#include "trimodal/optim.h"
#include "trimodal/pipeline.h"
#include "trimodal/retrieval.h"
#include "trimodal/selfcheck.h"

using namespace trimodal;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

bool g_all_pass = true;

void run_criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0 && seconds >= time_limit_s) {
    o.pass = false;
    o.detail += fmt("; over the %.0f s limit", time_limit_s);
  }
  g_all_pass = g_all_pass && o.pass;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              seconds);
  std::fflush(stdout);
}

double pooled(const oracle::Rows& l, const oracle::Rows& r, Pooling p, bool normalize) {
  const auto m = oracle::matchmap(l, r, normalize);
  const bool over_right = p == Pooling::kSIMA || p == Pooling::kSIMT || p == Pooling::kSTMA;
  return over_right ? oracle::mean_of_max_over_right(m, l.n, r.n) : oracle::mean_of_max_over_left(m, l.n, r.n);
}

std::vector<std::size_t> slot(const ImpostorSet& imp, std::size_t s) {
  std::vector<std::size_t> out;
  for (const auto& row : imp.slots) out.push_back(row[s]);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 7), emb(1, 10);
  double map_dev = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = emb(gen), r = size(gen), c = size(gen);
    const oracle::Rows oi = oracle::random_rows(r * c, d, gen);
    const oracle::Rows oa = oracle::random_rows(size(gen), d, gen);
    const oracle::Rows ot = oracle::random_rows(size(gen), d, gen);
    const ImageGridFeatures img{testing::to_tensor(oi, {r, c, d})};
    const SequenceFeatures aud{testing::to_tensor(oa, {oa.n, d}), Modality::kAudio};
    const SequenceFeatures txt{testing::to_tensor(ot, {ot.n, d}), Modality::kText};
    for (bool normalize : {false, true}) {
      auto compare = [&](const Matchmap& m, const oracle::Rows& x, const oracle::Rows& y) {
        const auto want = oracle::matchmap(x, y, normalize);
        if (m.values.numel() != want.size()) throw std::runtime_error("matchmap size mismatch");
        for (std::size_t i = 0; i < want.size(); ++i) map_dev = std::max(map_dev, std::abs(m.values.at(i) - want[i]));
      };
      compare(compute_matchmap(img, aud, normalize), oi, oa);
      compare(compute_matchmap(img, txt, normalize), oi, ot);
      compare(compute_matchmap(txt, aud, normalize), ot, oa);
      auto dev = [&](double got, double want) { map_dev = std::max(map_dev, std::abs(got - want)); };
      dev(similarity(img, aud, {Pooling::kSIMA, normalize}).item(), pooled(oi, oa, Pooling::kSIMA, normalize));
      dev(similarity(img, aud, {Pooling::kMISA, normalize}).item(), pooled(oi, oa, Pooling::kMISA, normalize));
      dev(similarity(img, txt, {Pooling::kSIMT, normalize}).item(), pooled(oi, ot, Pooling::kSIMT, normalize));
      dev(similarity(img, txt, {Pooling::kMIST, normalize}).item(), pooled(oi, ot, Pooling::kMIST, normalize));
      dev(similarity(txt, aud, {Pooling::kSTMA, normalize}).item(), pooled(ot, oa, Pooling::kSTMA, normalize));
    }
  }

  double loss_dev = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t b = 2 + trial % 5, d = 1 + trial % 4;
    std::vector<oracle::Rows> oi, oa, ot;
    Minibatch batch;
    for (std::size_t i = 0; i < b; ++i) {
      oi.push_back(oracle::random_rows(4, d, gen));
      oa.push_back(oracle::random_rows(2 + i % 3, d, gen));
      ot.push_back(oracle::random_rows(1 + i % 2, d, gen));
      batch.images.push_back({testing::to_tensor(oi.back(), {2, 2, d})});
      batch.audio.push_back({testing::to_tensor(oa.back(), {oa.back().n, d}), Modality::kAudio});
      batch.text.push_back({testing::to_tensor(ot.back(), {ot.back().n, d}), Modality::kText});
    }
    MarginConfig cfg;
    cfg.eta = 0.25 * (trial % 7);
    const bool sum_mode = trial % 2 == 1;
    cfg.image_audio = {sum_mode ? Pooling::kMISA : Pooling::kSIMA, sum_mode};
    cfg.image_text = {sum_mode ? Pooling::kMIST : Pooling::kSIMT, sum_mode};
    cfg.text_audio = {Pooling::kSTMA, sum_mode};
    oracle::Table s_ia(b, std::vector<double>(b)), s_it = s_ia, s_ta = s_ia;
    for (std::size_t x = 0; x < b; ++x) {
      for (std::size_t y = 0; y < b; ++y) {
        s_ia[x][y] = pooled(oi[x], oa[y], cfg.image_audio.pooling, sum_mode);
        s_it[x][y] = pooled(oi[x], ot[y], cfg.image_text.pooling, sum_mode);
        s_ta[x][y] = pooled(ot[x], oa[y], cfg.text_audio.pooling, sum_mode);
      }
    }
    const ImpostorSet imp = sample_impostors(b, true, 1000 + trial);
    const double ia = oracle::pair_terms(s_ia, slot(imp, 0), slot(imp, 1), cfg.eta);
    const double it = oracle::pair_terms(s_it, slot(imp, 2), slot(imp, 3), cfg.eta);
    const double ta = oracle::pair_terms(s_ta, slot(imp, 4), slot(imp, 5), cfg.eta);
    loss_dev = std::max(loss_dev, std::abs(bimodal_loss(batch, imp, cfg).item() - ia));
    loss_dev = std::max(loss_dev, std::abs(trimodal_loss(batch, imp, cfg).total.item() - (ia + it + ta)));
  }
  return {map_dev <= 1e-12 && loss_dev <= 1e-10,
          fmt("matchmap/pooling max deviation %.2e (<= 1e-12) over 100 instances, loss max deviation %.2e "
              "(<= 1e-10) over 20",
              map_dev, loss_dev)};
}

Outcome gradient_suite_20_seeds() {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0, skipped = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const GradSuiteLine& line : gradient_suite(seed)) {
      checked += line.result.checked;
      skipped += line.result.skipped;
      if (line.result.max_relative_error > worst) {
        worst = line.result.max_relative_error;
        where = line.name + " seed " + std::to_string(seed);
      }
    }
  }
  return {worst < 1e-4 && checked > 0,
          fmt("max relative error %.2e (< 1e-4), ", worst) + std::to_string(checked) + " coordinates checked, " +
              std::to_string(skipped) + " kink-adjacent skipped" + (where.empty() ? "" : ", worst at " + where)};
}

Outcome worked_values() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  const ImageGridFeatures img{Tensor(Shape{2, 2, 1}, std::vector<double>{1, 2, 3, 4})};
  const SequenceFeatures aud{Tensor(Shape{2, 1}, std::vector<double>{1, -1}), Modality::kAudio};
  expect(similarity(img, aud, {Pooling::kSIMA}).item() == 2.5, "SIMA 2.5");
  expect(similarity(img, aud, {Pooling::kMISA}).item() == 1.5, "MISA 1.5");

  const oracle::Table s{{0.9, 0.2}, {0.5, 0.8}};
  const PairSimilarity table = [&](std::size_t a, std::size_t b) { return Tensor::scalar(s[a][b]); };
  // 0.3 has no exact binary form; the hinge sum lands within an ulp of it.
  const double l = bimodal_loss(table, sample_impostors(2, false, 0), 0.5).item();
  expect(std::abs(l - 0.3) <= 1e-12, "B=2 loss 0.3");

  for (std::size_t b : {2, 4, 7}) {
    for (double eta : {0.5, 1.0}) {
      Minibatch batch;
      for (std::size_t i = 0; i < b; ++i) {
        batch.images.push_back({Tensor(Shape{2, 2, 3}, 0.4)});
        batch.audio.push_back({Tensor(Shape{3, 3}, -0.2), Modality::kAudio});
        batch.text.push_back({Tensor(Shape{2, 3}, 0.7), Modality::kText});
      }
      MarginConfig cfg;
      cfg.eta = eta;
      const double bd = static_cast<double>(b);
      expect(bimodal_loss(batch, sample_impostors(b, false, 1), cfg).item() == 2.0 * bd * eta, "2B eta");
      expect(trimodal_loss(batch, sample_impostors(b, true, 1), cfg).total.item() == 6.0 * bd * eta, "6B eta");
    }
  }

  const ScheduleConfig sched{0.001, 10.0, 70};
  expect(lr_at_epoch(0, sched) == 0.001, "lr epoch 0");
  expect(lr_at_epoch(70, sched) == 0.0001, "lr epoch 70");
  expect(lr_at_epoch(140, sched) == 0.00001, "lr epoch 140");

  expect(select_frames(15, Split::kTrain) == std::vector<std::size_t>{2, 5, 7, 9, 12}, "frames F=15");
  const auto span = adjust_narration_span(5.0, 9.0);
  expect(span && span->start_s == 4.7 && span->end_s == 7.7, "span (5,9)");

  std::string detail = "SIMA=2.5, MISA=1.5, loss 0.3, 2B eta / 6B eta, lr 1e-3/1e-4/1e-5, frames [2,5,7,9,12], "
                       "span (4.7, 7.7)";
  if (!failures.empty()) {
    detail = "mismatched:";
    for (const auto& f : failures) detail += " " + f + ";";
  }
  return {failures.empty(), detail};
}

// Corpus and configuration shared by criteria 4 and 5.
SyntheticCorpus criterion_corpus() {
  SyntheticConfig sc;
  sc.n_concepts = 50;
  sc.n_train = 400;
  sc.n_val = 50;
  sc.noise_sigma = 0.1;
  sc.seed = 1;
  return generate_synthetic_corpus(sc);
}

TrainConfig criterion_config(std::uint64_t seed, bool trimodal) {
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 20;
  cfg.emb_size = 16;
  cfg.margin.eta = 1.0;
  cfg.margin.image_audio.normalize = cfg.margin.image_text.normalize = cfg.margin.text_audio.normalize = true;
  cfg.schedule.base_lr = 0.001;
  cfg.trimodal = trimodal;
  cfg.seed = seed;
  return cfg;
}

struct RecallPair {
  double image_r1 = 0, image_r5 = 0, audio_r1 = 0, audio_r5 = 0;
};

RecallPair final_recall(const RunLog& log) {
  const auto& r = log.epochs.back().recalls;
  return {r[0].at_k(1), r[0].at_k(5), r[1].at_k(1), r[1].at_k(5)};
}

struct SeedRuns {
  std::vector<RecallPair> trimodal, bimodal;
  double first_run_seconds = 0.0;
};

const SeedRuns& seed_runs() {
  static const SeedRuns runs = [] {
    SeedRuns out;
    const SyntheticCorpus corpus = criterion_corpus();
    const Dataset train_set = make_dataset(corpus.train), val = make_dataset(corpus.val);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto t0 = std::chrono::steady_clock::now();
      out.trimodal.push_back(final_recall(train(train_set, &val, criterion_config(seed, true)).log));
      if (seed == 1) {
        out.first_run_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
      out.bimodal.push_back(final_recall(train(train_set, &val, criterion_config(seed, false)).log));
    }
    return out;
  }();
  return runs;
}

Outcome synthetic_retrieval() {
  // (a) the seed-1 trimodal run; all ten runs of criterion 5 are trained here.
  const SeedRuns& runs = seed_runs();
  const RecallPair r = runs.trimodal[0];
  const double seconds = runs.first_run_seconds;
  const bool a = r.image_r1 >= 0.6 && r.audio_r1 >= 0.6 && r.image_r5 >= 0.9 && r.audio_r5 >= 0.9 &&
                 seconds <= 300.0;

  const SyntheticCorpus corpus = criterion_corpus();
  const Dataset train_set = make_dataset(corpus.train), val = make_dataset(corpus.val);

  // (b) untrained models over 5 seeds, both directions pooled.
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainConfig cfg = criterion_config(seed, true);
    TrainConfig sized = cfg;
    sized.vocab_size = corpus.vocab_size;
    const Model model = Model::create(sized, train_set);
    for (const RecallReport& rep : evaluate(val, model, cfg)) mean += rep.at_k(1) / 10.0;
  }
  const double p = 1.0 / 50.0;
  const double se = std::sqrt(p * (1.0 - p) / (5.0 * 2.0 * 50.0));
  const bool b = std::abs(mean - p) <= 3.0 * se;
  return {a && b, fmt("(a) image-query R@1 %.2f R@5 %.2f, audio-query R@1 %.2f R@5 %.2f", r.image_r1, r.image_r5,
                      r.audio_r1, r.audio_r5) +
                      fmt(" in %.0f s (need R@1 >= 0.6, R@5 >= 0.9, <= 300 s); ", seconds) +
                      fmt("(b) untrained mean R@1 %.4f vs chance %.4f, 3 SE = %.4f", mean, p, 3.0 * se)};
}

Outcome text_helps() {
  const SeedRuns& runs = seed_runs();
  RecallPair tri, bi;
  for (std::size_t s = 0; s < 5; ++s) {
    tri.image_r1 += runs.trimodal[s].image_r1 / 5.0;
    tri.audio_r1 += runs.trimodal[s].audio_r1 / 5.0;
    bi.image_r1 += runs.bimodal[s].image_r1 / 5.0;
    bi.audio_r1 += runs.bimodal[s].audio_r1 / 5.0;
  }
  return {tri.image_r1 >= bi.image_r1 && tri.audio_r1 >= bi.audio_r1,
          fmt("mean R@1 over 5 seeds: image-query trimodal %.3f vs bimodal %.3f, audio-query trimodal %.3f vs "
              "bimodal %.3f",
              tri.image_r1, bi.image_r1, tri.audio_r1, bi.audio_r1)};
}

Outcome recall_invariants() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  std::uniform_int_distribution<int> coarse(-3, 3);
  std::normal_distribution<double> fine;
  std::size_t violations = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  for (int trial = 0; trial < 200; ++trial) {
    SimilarityMatrix s;
    s.size = size(gen);
    s.values.resize(s.size * s.size);
    const bool tied = trial % 2 == 0;
    for (double& x : s.values) x = tied ? coarse(gen) : fine(gen);
    SimilarityMatrix squashed = s;
    for (double& x : squashed.values) x = std::tanh(0.7 * x) + x * x * x;
    for (QueryDirection dir : {QueryDirection::kImageQuery, QueryDirection::kAudioQuery}) {
      double previous = 0.0;
      for (std::size_t k = 1; k <= s.size; ++k) {
        const double r = recall_at_k(s, k, dir);
        std::size_t hits = 0;
        for (std::size_t q = 0; q < s.size; ++q) {
          std::vector<double> scores(s.size);
          for (std::size_t c = 0; c < s.size; ++c) {
            scores[c] = dir == QueryDirection::kImageQuery ? s.at(q, c) : s.at(c, q);
          }
          if (oracle::rank(scores, q) < k) ++hits;
        }
        expect(r == static_cast<double>(hits) / static_cast<double>(s.size));
        expect(r >= previous);
        expect(recall_at_k(squashed, k, dir) == r);
        previous = r;
      }
      expect(recall_at_k(s, s.size, dir) == 1.0);
    }
  }
  return {violations == 0, std::to_string(checks) + " checks over 200 matrices, " + std::to_string(violations) +
                               " violations (monotone in K, increasing-transform invariant, R@B = 1)"};
}

Outcome front_end() {
  std::mt19937_64 gen(440);
  std::uniform_int_distribution<std::size_t> len(400, 48000);
  std::size_t count_errors = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = len(gen);
    if (frame_signal(Waveform{std::vector<double>(n, 0.25), 16000}).n_frames != oracle::frame_count(n, 400, 160)) {
      ++count_errors;
    }
  }

  // DFT oracle: the band whose triangle holds the spectral peak.
  const Waveform tone = make_tone(440.0, 0.5);
  const FrameMatrix frames = frame_signal(tone);
  const LogMelSpectrogram spec = log_mel(frames);
  std::vector<double> edges{0.0};
  for (double c : oracle::mel_centers(40, 0.0, 8000.0)) edges.push_back(c);
  edges.push_back(8000.0);
  auto tri = [&](std::size_t b, double f) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    if (f <= lo || f >= hi) return 0.0;
    return f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
  };
  std::size_t band_errors = 0;
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    std::vector<double> windowed(400);
    for (std::size_t n = 0; n < 400; ++n) {
      const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / 399.0);
      windowed[n] = tone.samples[i * 160 + n] * w;
    }
    const auto mag = oracle::dft_magnitude(windowed, 512);
    const double peak_hz = 16000.0 * static_cast<double>(std::max_element(mag.begin(), mag.end()) - mag.begin()) / 512.0;
    std::size_t predicted = 0, best = 0;
    for (std::size_t b = 1; b < 40; ++b) {
      if (tri(b, peak_hz) > tri(predicted, peak_hz)) predicted = b;
      if (spec.at(i, b) > spec.at(i, best)) best = b;
    }
    if (best != predicted) ++band_errors;
  }

  const auto silence = log_mel(frame_signal(Waveform{std::vector<double>(16000, 0.0), 16000}));
  const bool floor = std::all_of(silence.values.begin(), silence.values.end(),
                                 [](double v) { return v == std::log(1e-10); });
  return {count_errors == 0 && band_errors == 0 && floor,
          std::to_string(count_errors) + "/50 frame-count mismatches, " + std::to_string(band_errors) + "/" +
              std::to_string(frames.n_frames) + " tone frames off the predicted band, silence at log floor: " +
              (floor ? "yes" : "no")};
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "trimodal_acceptance";
  std::filesystem::remove_all(root);
  std::vector<std::string> differing;

  SyntheticConfig sc;
  sc.n_concepts = 12;
  sc.n_train = 60;
  sc.n_val = 12;
  sc.seed = 8;
  write_synthetic_corpus(root / "a", generate_synthetic_corpus(sc));
  write_synthetic_corpus(root / "b", generate_synthetic_corpus(sc));
  for (const char* name : {"train.tsv", "val.tsv", "train.tmck", "val.tmck"}) {
    if (slurp(root / "a" / name) != slurp(root / "b" / name)) differing.push_back(name);
  }

  std::vector<ActionAnnotation> actions;
  std::vector<NarrationAnnotation> narrations;
  for (int i = 0; i < 30; ++i) {
    const double t = 4.0 * i;
    actions.push_back({"P0" + std::to_string(i % 3), t, t + 2.5, i % 2 ? "opening the fridge door" : "wash plate"});
    narrations.push_back({"P0" + std::to_string(i % 3), t + 0.4, t + 1.5, i % 2 ? "open fridge" : "wash plate"});
  }
  PrepConfig pc;
  pc.val_fraction = pc.test_fraction = 0.2;
  write_manifest(root / "prep_a.tsv", prepare_corpus(actions, narrations, pc).records);
  write_manifest(root / "prep_b.tsv", prepare_corpus(actions, narrations, pc).records);
  if (slurp(root / "prep_a.tsv") != slurp(root / "prep_b.tsv")) differing.push_back("prep manifest");

  const Dataset train_set = load_dataset(root / "a" / "train.tsv"), val = load_dataset(root / "a" / "val.tsv");
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 12;
  cfg.eval_every = 1;
  cfg.seed = 5;
  std::vector<std::string> logs, metrics, checkpoints;
  for (int run = 0; run < 2; ++run) {
    const TrainResult r = train(train_set, &val, cfg);
    logs.push_back(format_loss_csv(r.log));
    metrics.push_back(format_metrics_csv(r.log, cfg));
    const auto path = root / ("checkpoint_" + std::to_string(run) + ".tmck");
    r.model.to_archive().save(path);
    checkpoints.push_back(slurp(path));
  }
  if (logs[0] != logs[1]) differing.push_back("loss log");
  if (metrics[0] != metrics[1]) differing.push_back("metrics log");
  if (checkpoints[0] != checkpoints[1]) differing.push_back("checkpoint");
  std::filesystem::remove_all(root);

  std::string detail = "synthetic manifests and payloads, prep manifest, loss/metrics logs and checkpoints "
                       "byte-identical across repeated runs";
  if (!differing.empty()) {
    detail = "differing outputs:";
    for (const auto& d : differing) detail += " " + d + ";";
  }
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  run_criterion(1, "oracle equivalence", 10.0, oracle_equivalence);
  run_criterion(2, "gradient suite, 20 seeds", 60.0, gradient_suite_20_seeds);
  run_criterion(3, "worked values", 0.0, worked_values);
  run_criterion(4, "synthetic retrieval", 0.0, synthetic_retrieval);
  run_criterion(5, "trimodal vs bimodal, 5 seeds", 0.0, text_helps);
  run_criterion(6, "retrieval metric invariants", 5.0, recall_invariants);
  run_criterion(7, "front-end checks", 0.0, front_end);
  run_criterion(8, "determinism", 0.0, determinism);
  std::printf("%s\n", g_all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return g_all_pass ? 0 : 1;
}
