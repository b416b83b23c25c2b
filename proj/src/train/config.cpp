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
#include "aeromamba/train/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "aeromamba/errors.hpp"
#include "aeromamba/util/csv.hpp"

namespace aeromamba::train {

namespace pt = boost::property_tree;

namespace {

// Reads key into out when present; unparsable values are errors.
template <typename T>
void read_key(const pt::ptree& section, const char* key, T& out) {
  const auto child = section.get_child_optional(key);
  if (!child) return;
  try {
    out = child->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ArgumentError(fmt::format("config: bad value '{}' for '{}'", child->data(), key));
  }
}

}  // namespace

void TrainConfig::validate() const {
  generator.validate();
  const auto min_segment = 4 * static_cast<std::size_t>(generator.stft.window_size);
  if (!(lr > 0.0) || batch_size < 1 || segment_length < min_segment || epochs < 0 ||
      steps_per_epoch < 1 || validate_every < 1 || validation_tracks < 1 || !(lambda >= 0.0) ||
      !(clip_norm > 0.0)) {
    throw ArgumentError(fmt::format(
        "invalid training config: lr={} batch_size={} segment_length={} (min {}) epochs={} "
        "steps_per_epoch={} validate_every={} validation_tracks={} lambda={} clip_norm={}",
        lr, batch_size, segment_length, min_segment, epochs, steps_per_epoch, validate_every,
        validation_tracks, lambda, clip_norm));
  }
}

std::string TrainConfig::to_text() const {
  return fmt::format(
      "[train]\nlr = {}\nbatch_size = {}\nsegment_length = {}\nepochs = {}\n"
      "steps_per_epoch = {}\nseed = {}\nvalidate_every = {}\nvalidation_tracks = {}\n"
      "lambda = {}\nclip_norm = {}\ncheckpoint_dir = {}\n\n{}",
      util::format_number(lr), batch_size, segment_length, epochs, steps_per_epoch, seed,
      validate_every, validation_tracks, util::format_number(lambda),
      util::format_number(clip_norm), checkpoint_dir, generator.to_text());
}

TrainConfig TrainConfig::from_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ArgumentError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (section != "train" && section != "generator") {
      throw ArgumentError(fmt::format("config: unknown section or key '{}'", section));
    }
  }
  TrainConfig c;
  c.generator = model::GeneratorConfig::from_text(text);
  if (const auto s = tree.get_child_optional("train")) {
    static const std::set<std::string> known{
        "lr", "batch_size", "segment_length", "epochs", "steps_per_epoch", "seed",
        "validate_every", "validation_tracks", "lambda", "clip_norm", "checkpoint_dir"};
    for (const auto& [key, value] : *s) {
      if (!known.contains(key)) throw ArgumentError(fmt::format("config: unknown key 'train.{}'", key));
    }
    try {
      read_key(*s, "lr", c.lr);
      read_key(*s, "batch_size", c.batch_size);
      read_key(*s, "segment_length", c.segment_length);
      read_key(*s, "epochs", c.epochs);
      read_key(*s, "steps_per_epoch", c.steps_per_epoch);
      read_key(*s, "seed", c.seed);
      read_key(*s, "validate_every", c.validate_every);
      read_key(*s, "validation_tracks", c.validation_tracks);
      read_key(*s, "lambda", c.lambda);
      read_key(*s, "clip_norm", c.clip_norm);
      read_key(*s, "checkpoint_dir", c.checkpoint_dir);
    } catch (const pt::ptree_bad_data& e) {
      throw ArgumentError(fmt::format("config: {}", e.what()));
    }
  }
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace aeromamba::train
