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

#include "trimodal/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "trimodal/ops.h"
#include "trimodal/random.h"

namespace trimodal {

namespace {

enum SeedStream : std::uint64_t { kImageInit = 1, kAudioInit = 2, kTextInit = 3, kBatching = 4 };

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void check_dataset(const Dataset& data, const Model& model, const TrainConfig& cfg, const char* what) {
  if (data.images.size() != data.size() || data.spectrograms.size() != data.size()) {
    throw std::invalid_argument(std::string(what) + ": payload count does not match records");
  }
  const std::size_t factor = model.image.downsample();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string& id = data.records[i].id;
    const Tensor& img = data.images[i];
    if (img.rank() != 3 || img.dim(2) != model.image.config().in_channels ||
        img.dim(0) % factor != 0 || img.dim(1) % factor != 0) {
      throw std::invalid_argument(std::string(what) + ": record '" + id + "' has image shape " +
                                  shape_str(img.shape()) + " incompatible with the image encoder");
    }
    const Tensor& spec = data.spectrograms[i];
    if (spec.rank() != 2 || spec.dim(1) != model.audio.config().n_mels ||
        spec.dim(0) < AudioEncoder::kTemporalDownsample) {
      throw std::invalid_argument(std::string(what) + ": record '" + id + "' has spectrogram shape " +
                                  shape_str(spec.shape()) + " incompatible with the audio encoder");
    }
    if (cfg.trimodal) {
      const auto& ids = data.records[i].tokens.ids;
      if (ids.empty()) throw std::invalid_argument(std::string(what) + ": record '" + id + "' has no tokens");
      for (std::size_t t : ids) {
        if (t >= model.text.config().vocab_size) {
          throw std::invalid_argument(std::string(what) + ": record '" + id + "' token " +
                                      std::to_string(t) + " outside vocabulary");
        }
      }
    }
  }
}

std::vector<double> value_matrix(std::size_t b, const std::function<Tensor(std::size_t, std::size_t)>& s) {
  std::vector<double> out(b * b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) out[i * b + j] = s(i, j).item();
  }
  return out;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& manifest) {
  Dataset data;
  data.records = read_manifest(manifest);
  if (data.records.empty()) throw std::runtime_error(manifest.string() + ": manifest is empty");
  const auto dir = manifest.parent_path();
  std::map<std::string, TensorArchive> archives;
  auto fetch = [&](const std::string& ref) {
    auto [file, name] = split_payload_ref(ref);
    auto it = archives.find(file);
    if (it == archives.end()) it = archives.emplace(file, TensorArchive::load(dir / file)).first;
    return it->second.tensor(name);
  };
  for (const TupleRecord& r : data.records) {
    data.images.push_back(fetch(r.image_ref));
    data.spectrograms.push_back(fetch(r.audio_ref));
  }
  return data;
}

Dataset make_dataset(const SyntheticSplit& split) {
  Dataset data;
  data.records = split.records;
  for (const TupleRecord& r : split.records) {
    data.images.push_back(split.payload.tensor(split_payload_ref(r.image_ref).second));
    data.spectrograms.push_back(split.payload.tensor(split_payload_ref(r.audio_ref).second));
  }
  return data;
}

std::size_t infer_vocab_size(const std::vector<const Dataset*>& sets) {
  std::size_t vocab = 0;
  for (const Dataset* d : sets) {
    if (!d) continue;
    for (const TupleRecord& r : d->records) {
      for (std::size_t t : r.tokens.ids) vocab = std::max(vocab, t + 1);
    }
  }
  return vocab;
}

Model Model::create(const TrainConfig& cfg, std::size_t image_channels, std::size_t n_mels,
                    std::size_t vocab_size) {
  validate(cfg);
  ImageEncoderConfig ic{image_channels, cfg.image_channels, cfg.emb_size};
  AudioEncoderConfig ac{n_mels, cfg.audio_hidden, cfg.audio_kernel, cfg.emb_size};
  TextEncoderConfig tc{std::max<std::size_t>(vocab_size, 1), cfg.emb_size, cfg.freeze_text};
  return Model{ImageEncoder(ic, derive_seed(cfg.seed, kImageInit)),
               AudioEncoder(ac, derive_seed(cfg.seed, kAudioInit)),
               TextEncoder(tc, derive_seed(cfg.seed, kTextInit))};
}

Model Model::create(const TrainConfig& cfg, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("Model::create: empty dataset");
  const std::size_t vocab = cfg.vocab_size != 0 ? cfg.vocab_size : infer_vocab_size({&data});
  return create(cfg, data.images.front().dim(2), data.spectrograms.front().dim(1), vocab);
}

std::vector<Tensor> Model::trainable() const {
  std::vector<Tensor> out = image.parameters();
  for (const Tensor& t : audio.parameters()) out.push_back(t);
  for (const Tensor& t : text.parameters()) out.push_back(t);
  return out;
}

TensorArchive Model::to_archive() const {
  TensorArchive archive;
  for (const Tensor& t : image.parameters()) archive.add(t.name(), t);
  for (const Tensor& t : audio.parameters()) archive.add(t.name(), t);
  archive.add(text.table().name(), text.table());
  return archive;
}

void Model::load_archive(const TensorArchive& archive) {
  std::vector<Tensor> all = image.parameters();
  for (const Tensor& t : audio.parameters()) all.push_back(t);
  all.push_back(text.table());
  for (Tensor& t : all) {
    const auto& entry = archive.get(t.name());
    if (entry.shape != t.shape()) {
      throw std::invalid_argument("checkpoint: '" + t.name() + "' has shape " + shape_str(entry.shape) +
                                  ", model expects " + shape_str(t.shape()));
    }
    std::copy(entry.values.begin(), entry.values.end(), t.mutable_values().begin());
  }
}

RunLog train_model(Model& model, const Dataset& train_set, const Dataset* validation,
                   const TrainConfig& cfg) {
  validate(cfg);
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  if (cfg.batch_size > train_set.size()) {
    throw std::invalid_argument("train: batch_size " + std::to_string(cfg.batch_size) +
                                " exceeds the training set size " + std::to_string(train_set.size()));
  }
  check_dataset(train_set, model, cfg, "train");
  if (validation) check_dataset(*validation, model, cfg, "validation");

  std::vector<Tensor> params = model.trainable();
  OptimizerState opt{cfg.schedule.base_lr, cfg.momentum, {}};
  Rng rng(derive_seed(cfg.seed, kBatching));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  RunLog log;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.learning_rate = lr_at_epoch(epoch, cfg.schedule);
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      if (b < 2) break;
      Minibatch batch;
      for (std::size_t n = 0; n < b; ++n) {
        const std::size_t idx = order[start + n];
        batch.images.push_back(model.image.encode(train_set.images[idx]));
        batch.audio.push_back(model.audio.encode(train_set.spectrograms[idx]));
        if (cfg.trimodal) batch.text.push_back(model.text.encode(train_set.records[idx].tokens));
      }
      ImpostorSet imp;
      if (cfg.hard_negatives) {
        NoGradGuard no_grad;
        const auto& m = cfg.margin;
        auto s_ia = value_matrix(b, [&](std::size_t i, std::size_t j) {
          return similarity(batch.images[i], batch.audio[j], m.image_audio);
        });
        std::vector<double> s_it, s_ta;
        if (cfg.trimodal) {
          s_it = value_matrix(b, [&](std::size_t i, std::size_t j) {
            return similarity(batch.images[i], batch.text[j], m.image_text);
          });
          s_ta = value_matrix(b, [&](std::size_t i, std::size_t j) {
            return similarity(batch.text[i], batch.audio[j], m.text_audio);
          });
        }
        imp = hardest_impostors(b, s_ia, s_it, s_ta);
      } else {
        imp = sample_impostors(b, cfg.trimodal, rng);
      }
      const Tensor loss = cfg.trimodal ? trimodal_loss(batch, imp, cfg.margin).total
                                       : bimodal_loss(batch, imp, cfg.margin);
      for (Tensor& p : params) p.zero_grad();
      if (loss.requires_grad()) {
        backward(loss);
        sgd_step(params, opt);
      }
      loss_sum += loss.item();
      ++steps;
    }
    EpochRecord record{epoch, opt.learning_rate, steps ? loss_sum / static_cast<double>(steps) : 0.0, {}};
    const bool last = epoch + 1 == cfg.epochs;
    const bool scheduled = cfg.eval_every != 0 && (epoch + 1) % cfg.eval_every == 0;
    if (validation && (last || scheduled)) record.recalls = evaluate(*validation, model, cfg);
    log.epochs.push_back(std::move(record));
  }
  return log;
}

TrainResult train(const Dataset& train_set, const Dataset* validation, const TrainConfig& cfg) {
  TrainConfig effective = cfg;
  if (effective.vocab_size == 0) effective.vocab_size = infer_vocab_size({&train_set, validation});
  Model model = Model::create(effective, train_set);
  RunLog log = train_model(model, train_set, validation, effective);
  return {std::move(model), std::move(log)};
}

std::vector<RecallReport> evaluate(const Dataset& split, const Model& model, const TrainConfig& cfg) {
  if (split.size() == 0) throw std::invalid_argument("evaluate: empty split");
  NoGradGuard no_grad;
  std::vector<ImageGridFeatures> images;
  std::vector<SequenceFeatures> audio;
  for (std::size_t i = 0; i < split.size(); ++i) {
    images.push_back(model.image.encode(split.images[i]));
    audio.push_back(model.audio.encode(split.spectrograms[i]));
  }
  const SimilarityMatrix s = similarity_matrix(images, audio, cfg.margin.image_audio);
  return {recall_report(s, QueryDirection::kImageQuery, kRecallKs),
          recall_report(s, QueryDirection::kAudioQuery, kRecallKs)};
}

std::string format_metrics_csv(const RunLog& log, const TrainConfig& cfg) {
  std::string out = "# seed=" + std::to_string(cfg.seed) + " modes=" + mode_triple(cfg) +
                    " eta=" + fmt(cfg.margin.eta) + " epochs=" + std::to_string(cfg.epochs) +
                    " trimodal=" + (cfg.trimodal ? "1" : "0") + "\n";
  out += "epoch,direction,k,recall\n";
  for (const EpochRecord& e : log.epochs) {
    for (const RecallReport& r : e.recalls) {
      for (const auto& [k, value] : r.recall) {
        out += std::to_string(e.epoch) + "," + direction_name(r.direction) + "," + std::to_string(k) +
               "," + fmt(value) + "\n";
      }
    }
  }
  return out;
}

std::string format_loss_csv(const RunLog& log) {
  std::string out = "epoch,lr,mean_loss\n";
  for (const EpochRecord& e : log.epochs) {
    out += std::to_string(e.epoch) + "," + fmt(e.learning_rate) + "," + fmt(e.mean_loss) + "\n";
  }
  return out;
}

}  // namespace trimodal
