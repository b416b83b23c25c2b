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
#include "aeromamba/cli/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "aeromamba/dsp/fir.hpp"
#include "aeromamba/dsp/metrics.hpp"
#include "aeromamba/dsp/wav.hpp"
#include "aeromamba/errors.hpp"
#include "aeromamba/infer/bench.hpp"
#include "aeromamba/infer/enhance.hpp"
#include "aeromamba/model/checkpoint.hpp"
#include "aeromamba/train/config.hpp"
#include "aeromamba/train/fit.hpp"
#include "aeromamba/train/synth.hpp"
#include "aeromamba/util/csv.hpp"

namespace aeromamba::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // degrade
  std::string in, out;
  int low_rate = dsp::kLowRate;
  int bits = 32;
  // synth-data
  std::uint64_t seed = 7;
  int tracks = 16;
  double seconds = 20.0;
  // train
  std::string config, data;
  // enhance / bench / inspect
  std::string checkpoint;
  bool streaming = false;
  std::size_t chunk_frames = 256;
  std::string csv;
  std::vector<double> segments = infer::kDefaultBenchSegments;
  int repeats = 3;
  // eval
  std::string ref;
  std::vector<std::string> est;
};

void save_audio(const dsp::AudioBuffer& audio, const std::string& path, int bits) {
  dsp::save_wav(audio, path, dsp::sample_format_for_bits(bits));
}

int do_degrade(const Options& o, std::ostream& out) {
  const auto input = dsp::load_wav(o.in);
  save_audio(dsp::degrade(input, o.low_rate), o.out, o.bits);
  out << fmt::format("degraded {} ({} samples, cutoff from {} Hz) -> {}\n", o.in, input.length(),
                     o.low_rate, o.out);
  return kExitOk;
}

int do_synth(const Options& o, std::ostream& out) {
  if (o.tracks < 1 || !(o.seconds > 0.0)) {
    throw ArgumentError("synth-data needs --tracks >= 1 and --seconds > 0");
  }
  train::save_dataset(train::synth_dataset(o.seed, o.tracks, o.seconds), o.out);
  out << fmt::format("wrote {} tracks of {} s to {}\n", o.tracks, o.seconds, o.out);
  return kExitOk;
}

int do_train(const Options& o, std::ostream& out) {
  const auto config = train::TrainConfig::from_file(o.config);
  const auto dataset = train::load_dataset(o.data);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", o.out, ec.message()));
  const auto r = train::fit(config, dataset, o.out);
  out << fmt::format("baseline val_lsd {}\nbest val_lsd {} at step {}\nbest {}\nlast {}\nmetrics {}\n",
                     util::format_number(r.baseline_lsd), util::format_number(r.best_val_lsd),
                     r.best_step, r.best_checkpoint.string(), r.last_checkpoint.string(),
                     r.metrics_csv.string());
  return kExitOk;
}

int do_enhance(const Options& o, std::ostream& out) {
  const auto generator = model::load_generator(model::load_checkpoint(o.checkpoint));
  const auto input = dsp::load_wav(o.in);
  const auto output = o.streaming ? infer::enhance_streaming(generator, input, o.chunk_frames)
                                  : infer::enhance_offline(generator, input);
  save_audio(output, o.out, o.bits);
  out << fmt::format("enhanced {} ({}) -> {}\n", o.in, o.streaming ? "streaming" : "offline", o.out);
  return kExitOk;
}

// Track id -> file; a single file maps its stem.
std::map<std::string, fs::path> audio_files(const std::string& path) {
  std::map<std::string, fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") {
        files[e.path().stem().string()] = e.path();
      }
    }
    if (files.empty()) throw IoError(fmt::format("no .wav files in '{}'", path));
  } else if (fs::is_regular_file(path)) {
    files[fs::path(path).stem().string()] = path;
  } else {
    throw IoError(fmt::format("'{}' does not exist", path));
  }
  return files;
}

int do_eval(const Options& o, std::ostream& out) {
  if (o.est.empty() || o.est.size() > 2) throw ArgumentError("eval takes one or two --est paths");
  const auto refs = audio_files(o.ref);
  std::vector<std::map<std::string, fs::path>> ests;
  for (const auto& e : o.est) ests.push_back(audio_files(e));
  const bool single_files = refs.size() == 1 && !fs::is_directory(o.ref);

  std::vector<std::vector<double>> scores(ests.size());
  std::vector<std::string> ids;
  for (const auto& [id, ref_path] : refs) {
    const auto ref = dsp::load_wav(ref_path);
    ids.push_back(id);
    for (std::size_t k = 0; k < ests.size(); ++k) {
      fs::path est_path;
      if (single_files && ests[k].size() == 1) {
        est_path = ests[k].begin()->second;
      } else {
        const auto it = ests[k].find(id);
        if (it == ests[k].end()) {
          throw IoError(fmt::format("no estimate for track '{}' in '{}'", id, o.est[k]));
        }
        est_path = it->second;
      }
      const auto est = dsp::load_wav(est_path);
      if (est.length() != ref.length()) {
        throw ArgumentError(fmt::format("track '{}': {} reference samples vs {} estimated", id,
                                        ref.length(), est.length()));
      }
      scores[k].push_back(dsp::lsd(ref, est));
    }
  }

  std::vector<std::string> header = {"track", "lsd"};
  if (ests.size() == 2) header.push_back("lsd_b");
  std::ofstream csv(o.csv, std::ios::trunc);
  if (!csv) throw IoError(fmt::format("cannot write {}", o.csv));
  csv << fmt::format("{}\n", fmt::join(header, ","));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row = {ids[i]};
    for (const auto& s : scores) row.push_back(util::format_number(s[i]));
    csv << fmt::format("{}\n", fmt::join(row, ","));
  }
  double mean = 0.0;
  for (double v : scores[0]) mean += v / scores[0].size();
  out << fmt::format("{} tracks, mean lsd {}\n", ids.size(), util::format_number(mean));
  if (ests.size() == 2) {
    const auto mw = dsp::mann_whitney_u(scores[0], scores[1]);
    csv << fmt::format("mw_u,{},{}\n", util::format_number(mw.u), util::format_number(mw.p_two_sided));
    out << fmt::format("mann-whitney U {} p {}\n", util::format_number(mw.u),
                       util::format_number(mw.p_two_sided));
  }
  if (!csv) throw IoError(fmt::format("write failed on {}", o.csv));
  return kExitOk;
}

int do_bench(const Options& o, std::ostream& out) {
  const auto generator = model::load_generator(model::load_checkpoint(o.checkpoint));
  infer::BenchOptions b;
  b.segments = o.segments;
  b.repeats = o.repeats;
  b.chunk_frames = o.chunk_frames;
  const auto rows = infer::bench(generator, b);
  infer::write_bench_csv(rows, o.csv);
  for (const auto& r : rows) {
    out << fmt::format("{:<10} {:>5} s  median {:.4f} s  state {} B  rt {:.2f}\n", r.mode,
                       r.segment_s, r.median_s, r.state_bytes, r.rt_factor);
  }
  return kExitOk;
}

int do_inspect(const Options& o, std::ostream& out) {
  const auto ckpt = model::load_checkpoint(o.checkpoint);
  std::size_t scalars = 0;
  for (const auto& t : ckpt.tensors) scalars += t.values.size();
  out << fmt::format("tensors {}\nparameters {}\n", ckpt.tensors.size(), scalars);
  out << "name,shape,crc32\n";
  for (const auto& t : ckpt.tensors) {
    out << fmt::format("{},[{}],{:08x}\n", t.name, fmt::join(t.dims, " "), t.checksum());
  }
  out << "config\n" << ckpt.config_text;
  if (!ckpt.config_text.empty() && ckpt.config_text.back() != '\n') out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Audio super-resolution with selective state-space layers.", "aeromamba");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Options o;

  auto* degrade = app.add_subcommand("degrade", "Low-pass and decimate, then restore the rate");
  degrade->add_option("--in", o.in, "Input WAV")->required();
  degrade->add_option("--out", o.out, "Output WAV")->required();
  degrade->add_option("--low-rate", o.low_rate, "Simulated low sample rate in Hz");
  degrade->add_option("--bits", o.bits, "Output sample format: 16, 24 or 32 (float)");

  auto* synth = app.add_subcommand("synth-data", "Write a synthetic piano-like dataset");
  synth->add_option("--seed", o.seed, "Dataset seed");
  synth->add_option("--tracks", o.tracks, "Number of tracks");
  synth->add_option("--seconds", o.seconds, "Seconds per track");
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a generator");
  train->add_option("--config", o.config, "INI training config")->required();
  train->add_option("--data", o.data, "Directory of 44.1 kHz WAV tracks")->required();
  train->add_option("--out", o.out, "Output directory for metrics and checkpoints")->required();

  auto* enhance = app.add_subcommand("enhance", "Enhance a WAV file");
  enhance->add_option("--checkpoint", o.checkpoint, "Generator checkpoint")->required();
  enhance->add_option("--in", o.in, "Input WAV")->required();
  enhance->add_option("--out", o.out, "Output WAV")->required();
  enhance->add_flag("--streaming", o.streaming, "Process in fixed-size chunks");
  enhance->add_option("--chunk-frames", o.chunk_frames, "Streaming chunk length in STFT frames");
  enhance->add_option("--bits", o.bits, "Output sample format: 16, 24 or 32 (float)");

  auto* eval = app.add_subcommand("eval", "Log-spectral distance per track");
  eval->add_option("--ref", o.ref, "Reference WAV or directory")->required();
  eval->add_option("--est", o.est, "Estimate WAV or directory; twice to compare two systems")
      ->required()
      ->expected(1, 2);
  eval->add_option("--csv", o.csv, "Output CSV")->required();

  auto* bench = app.add_subcommand("bench", "Time offline and streaming enhancement");
  bench->add_option("--checkpoint", o.checkpoint, "Generator checkpoint")->required();
  bench->add_option("--csv", o.csv, "Output CSV")->required();
  bench->add_option("--segments", o.segments, "Segment lengths in seconds")->delimiter(',');
  bench->add_option("--repeats", o.repeats, "Timed repeats per segment");
  bench->add_option("--chunk-frames", o.chunk_frames, "Streaming chunk length in STFT frames");

  auto* inspect = app.add_subcommand("inspect-checkpoint", "Print a checkpoint's tensor table");
  inspect->add_option("checkpoint", o.checkpoint, "Checkpoint file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0 after printing; everything else is a usage error.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*degrade) return do_degrade(o, out);
    if (*synth) return do_synth(o, out);
    if (*train) return do_train(o, out);
    if (*enhance) return do_enhance(o, out);
    if (*eval) return do_eval(o, out);
    if (*bench) return do_bench(o, out);
    if (*inspect) return do_inspect(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return kExitUsage;
}

}  // namespace aeromamba::cli
