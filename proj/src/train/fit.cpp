// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "aeromamba/train/fit.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "aeromamba/dsp/metrics.hpp"
#include "aeromamba/errors.hpp"
#include "aeromamba/model/checkpoint.hpp"
#include "aeromamba/util/csv.hpp"

namespace aeromamba::train {

BatchSampler::BatchSampler(std::span<const Track> tracks, int batch_size,
                           std::size_t segment_length, std::uint64_t seed)
    : tracks_(tracks),
      batch_size_(batch_size),
      segment_length_(segment_length),
      rng_(seed) {
  if (tracks.empty()) throw ArgumentError("no training tracks");
  for (const auto& t : tracks) {
    if (t.high.length() < segment_length || t.low.length() != t.high.length()) {
      throw ArgumentError(fmt::format("track {} is shorter than one segment ({} samples)",
                                      t.id, segment_length));
    }
  }
}

Batch BatchSampler::next() {
  const std::size_t b = batch_size_, n = segment_length_;
  std::vector<double> low(b * n), high(b * n);
  for (std::size_t i = 0; i < b; ++i) {
    const auto& track = tracks_[rng_() % tracks_.size()];
    const std::size_t offset = rng_() % (track.high.length() - n + 1);
    const auto lo = track.low.channel(0).subspan(offset, n);
    const auto hi = track.high.channel(0).subspan(offset, n);
    std::copy(lo.begin(), lo.end(), low.begin() + i * n);
    std::copy(hi.begin(), hi.end(), high.begin() + i * n);
  }
  return {ad::Tensor({b, n}, std::move(low)), ad::Tensor({b, n}, std::move(high))};
}

Trainer::Trainer(const TrainConfig& config)
    : config_(config),
      generator_(config.generator, config.seed),
      discriminator_({}, config.seed + 1),
      g_params_(model::tensors_of(generator_.parameters())),
      d_params_(model::tensors_of(discriminator_.parameters())),
      g_opt_(g_params_, {.lr = config.lr}),
      d_opt_(d_params_, {.lr = config.lr}) {
  config_.validate();
}

namespace {

void check_finite(const char* name, double value) {
  if (!std::isfinite(value)) {
    throw NumericError(fmt::format("non-finite loss component {} = {}", name, value));
  }
}

}  // namespace

StepResult Trainer::step(const Batch& batch, const StepOptions& options) {
  StepResult result;
  const ad::Tensor fake = generator_.forward(batch.low);

  if (!options.freeze_discriminator) {
    const auto real_out = discriminator_.forward(batch.high);
    const auto fake_out = discriminator_.forward(fake.detach());
    const ad::Tensor loss_d = discriminator_loss(real_out, fake_out);
    check_finite("L_D", loss_d.item());
    result.losses.discriminator = loss_d.item();
    ad::backward(loss_d);
    result.discriminator_norm = ad::clip_grad_norm(d_params_, config_.clip_norm);
    d_opt_.step();
  }

  model::MultiScaleDiscriminator::Output real_out;
  {
    ad::NoGradGuard guard;
    real_out = discriminator_.forward(batch.high);
  }
  const auto fake_out = discriminator_.forward(fake);
  const ad::Tensor adv = adversarial_loss(fake_out);
  const ad::Tensor rec = reconstruction_loss(fake, batch.high, config_.generator.stft);
  const ad::Tensor fmap = feature_matching_loss(real_out, fake_out);
  const LossReport report =
      generator_total(adv.item(), rec.item(), fmap.item(), config_.lambda);
  if (options.freeze_discriminator) {
    // Frozen discriminator: L_D is still reported on the current batch.
    ad::NoGradGuard guard;
    result.losses.discriminator =
        discriminator_loss(real_out, discriminator_.forward(fake.detach())).item();
  }
  const double loss_d = result.losses.discriminator;
  result.losses = report;
  result.losses.discriminator = loss_d;

  const ad::Tensor total = ad::add(ad::add(adv, rec), ad::scale(fmap, config_.lambda));
  ad::backward(total);
  ad::clear_grads(d_params_);
  result.generator_norm = ad::clip_grad_norm(g_params_, config_.clip_norm);
  g_opt_.step();
  return result;
}

double validation_lsd(const model::Generator& generator, std::span<const Track> tracks) {
  if (tracks.empty()) throw ArgumentError("no validation tracks");
  double sum = 0.0;
  for (const auto& t : tracks) sum += dsp::lsd(t.high, generator.enhance(t.low));
  return sum / tracks.size();
}

double baseline_lsd(std::span<const Track> tracks) {
  if (tracks.empty()) throw ArgumentError("no validation tracks");
  double sum = 0.0;
  for (const auto& t : tracks) sum += dsp::lsd(t.high, t.low);
  return sum / tracks.size();
}

FitResult fit(const TrainConfig& config, const std::vector<Track>& dataset,
              const std::filesystem::path& out_dir, const FitOptions& options) {
  config.validate();
  if (dataset.size() <= static_cast<std::size_t>(config.validation_tracks)) {
    throw ArgumentError(fmt::format("dataset has {} tracks; need more than the {} held out",
                                    dataset.size(), config.validation_tracks));
  }
  const std::span<const Track> all(dataset);
  const std::size_t n_train = dataset.size() - config.validation_tracks;
  const auto train_tracks = all.first(n_train);
  const auto val_tracks = all.subspan(n_train);

  std::error_code ec;
  const auto ckpt_dir = out_dir / config.checkpoint_dir;
  std::filesystem::create_directories(ckpt_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", ckpt_dir.string(), ec.message()));

  FitResult result;
  result.metrics_csv = out_dir / "metrics.csv";
  result.best_checkpoint = ckpt_dir / "best.amba";
  result.last_checkpoint = ckpt_dir / "last.amba";
  result.baseline_lsd = baseline_lsd(val_tracks);
  result.best_val_lsd = std::numeric_limits<double>::infinity();

  util::CsvWriter csv(result.metrics_csv, {"step", "L_G", "L_adv", "L_rec", "L_fmap", "L_D", "val_lsd"});
  std::ofstream log(out_dir / "train.log", std::ios::trunc);
  if (!log) throw IoError(fmt::format("cannot write {}", (out_dir / "train.log").string()));
  log << fmt::format("train {} tracks, validate {} tracks, baseline val_lsd {}\n", n_train,
                     val_tracks.size(), util::format_number(result.baseline_lsd));

  Trainer trainer(config);
  BatchSampler sampler(train_tracks, config.batch_size, config.segment_length, config.seed);
  const std::string config_text = config.to_text();
  const int total = config.total_steps();
  for (int s = 1; s <= total; ++s) {
    StepResult r;
    try {
      r = trainer.step(sampler.next(), options.step);
    } catch (const NumericError& e) {
      log << fmt::format("step {}: aborted: {}\n", s, e.what());
      throw NumericError(fmt::format("step {}: {}", s, e.what()));
    }
    if (r.generator_norm > config.clip_norm) {
      log << fmt::format("step {}: clipped generator grad norm {} to {}\n", s,
                         util::format_number(r.generator_norm), util::format_number(config.clip_norm));
    }
    if (r.discriminator_norm > config.clip_norm) {
      log << fmt::format("step {}: clipped discriminator grad norm {} to {}\n", s,
                         util::format_number(r.discriminator_norm),
                         util::format_number(config.clip_norm));
    }

    StepRecord record{s, r.losses, std::nullopt};
    if (s % config.validate_every == 0 || s == total) {
      // Validate the stored (single precision) weights so a reloaded
      // checkpoint reproduces the recorded value.
      const auto ckpt = model::snapshot(trainer.generator().parameters(), config_text);
      const double v = validation_lsd(model::load_generator(ckpt), val_tracks);
      record.val_lsd = v;
      model::save_checkpoint(ckpt, result.last_checkpoint);
      if (v < result.best_val_lsd) {
        result.best_val_lsd = v;
        result.best_step = s;
        model::save_checkpoint(ckpt, result.best_checkpoint);
      }
      log << fmt::format("step {}: val_lsd {}\n", s, util::format_number(v));
    }
    const auto& l = r.losses;
    csv.row({std::to_string(s), util::format_number(l.generator), util::format_number(l.adversarial),
             util::format_number(l.reconstruction), util::format_number(l.feature),
             util::format_number(l.discriminator),
             record.val_lsd ? util::format_number(*record.val_lsd) : std::string()});
    csv.flush();
    log.flush();
    if (options.on_step) options.on_step(record);
  }
  if (total == 0) {
    const auto ckpt = model::snapshot(trainer.generator().parameters(), config_text);
    result.best_val_lsd = validation_lsd(model::load_generator(ckpt), val_tracks);
    model::save_checkpoint(ckpt, result.last_checkpoint);
    model::save_checkpoint(ckpt, result.best_checkpoint);
  }
  return result;
}

}  // namespace aeromamba::train
