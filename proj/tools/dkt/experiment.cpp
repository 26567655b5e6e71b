// SPDX-License-Identifier: Apache-2.0
#include "dkt/experiment.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <sstream>

#include "dkt/digest.hpp"
#include "dkt/error.hpp"

namespace dkt::cli {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ", ";
    s += fmt(items[i]);
  }
  return s + "]";
}

}  // namespace

std::string temperature_label(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void ExperimentConfig::validate() const {
  if (regimes.empty()) throw InvalidArgument("regimes must not be empty");
  if (seeds.empty()) throw InvalidArgument("seeds must not be empty");
  for (const auto& r : regimes)
    if (!parse_regime(r))
      throw InvalidArgument("unknown regime \"" + r + "\" (expected hard, soft, reg, pretrain or logitmatch)");
  for (double t : temperatures)
    if (!(t > 0.0)) throw InvalidArgument("temperatures must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (teacher_hidden.empty()) throw InvalidArgument("teacher-hidden needs at least one layer");
  if (student_projection > student_cells)
    throw InvalidArgument("student-projection must not exceed student-cells");
  if (streams == 0 || window == 0) throw InvalidArgument("streams and window must be positive");
  if (!(lr > 0.0) || !(teacher_lr > 0.0)) throw InvalidArgument("learning rates must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0) || !(teacher_momentum >= 0.0 && teacher_momentum < 1.0))
    throw InvalidArgument("momentum must lie in [0, 1)");
  if (pretrain_switch < -1) throw InvalidArgument("pretrain-switch must be -1 (auto) or >= 0");
  task().validate();
}

SynthTaskSpec ExperimentConfig::task() const {
  SynthTaskSpec spec;
  spec.num_classes = classes;
  spec.feature_dim = feature_dim;
  spec.self_loop = self_loop;
  spec.noise_scale = noise;
  spec.centroid_scale = centroid_scale;
  spec.blend_frames = blend_frames;
  spec.min_length = min_length;
  spec.max_length = max_length;
  spec.train_utterances = train_utts;
  spec.cv_utterances = cv_utts;
  spec.test_utterances = test_utts;
  return spec;
}

std::vector<std::size_t> ExperimentConfig::teacher_dims() const {
  std::vector<std::size_t> dims{feature_dim};
  dims.insert(dims.end(), teacher_hidden.begin(), teacher_hidden.end());
  dims.push_back(classes);
  return dims;
}

LstmShape ExperimentConfig::student_shape() const {
  return {feature_dim, student_layers, student_cells, student_projection, classes};
}

ScheduleConfig ExperimentConfig::teacher_schedule() const {
  ScheduleConfig s;
  s.learning_rate = teacher_lr;
  s.momentum = teacher_momentum;
  s.clip_norm = clip;
  s.max_epochs = teacher_epochs;
  s.min_improvement = min_improvement;
  s.max_halvings = max_halvings;
  s.batch_frames = teacher_batch;
  s.record_wall_clock = !deterministic;
  return s;
}

ScheduleConfig ExperimentConfig::student_schedule() const {
  ScheduleConfig s;
  s.learning_rate = lr;
  s.momentum = momentum;
  s.clip_norm = clip;
  s.max_epochs = max_epochs;
  s.min_improvement = min_improvement;
  s.max_halvings = max_halvings;
  s.streams = streams;
  s.window = window;
  if (pretrain_switch >= 0) s.pretrain_switch_epoch = static_cast<std::size_t>(pretrain_switch);
  s.max_soft_epochs = max_soft_epochs;
  s.record_wall_clock = !deterministic;
  return s;
}

std::vector<Regime> ExperimentConfig::regime_list() const {
  std::vector<Regime> out;
  for (const auto& r : regimes) out.push_back(*parse_regime(r));
  return out;
}

std::string ExperimentConfig::canonical_text() const {
  const auto str = [](const std::string& s) { return "\"" + s + "\""; };
  const auto num = [](auto v) { return std::to_string(v); };
  std::ostringstream o;
  o << result_text() << "regimes = " << join(regimes, str) << '\n'
    << "temperatures = " << join(temperatures, real) << '\n'
    << "seeds = " << join(seeds, num) << '\n';
  return o.str();
}

std::string ExperimentConfig::result_text() const {
  std::ostringstream o;
  const auto str = [](const std::string& s) { return "\"" + s + "\""; };
  const auto num = [](auto v) { return std::to_string(v); };
  o << "data-dir = " << str(data_dir) << '\n'
    << "classes = " << classes << '\n'
    << "feature-dim = " << feature_dim << '\n'
    << "self-loop = " << real(self_loop) << '\n'
    << "noise = " << real(noise) << '\n'
    << "centroid-scale = " << real(centroid_scale) << '\n'
    << "blend-frames = " << blend_frames << '\n'
    << "min-length = " << min_length << '\n'
    << "max-length = " << max_length << '\n'
    << "train-utts = " << train_utts << '\n'
    << "cv-utts = " << cv_utts << '\n'
    << "test-utts = " << test_utts << '\n'
    << "teacher-hidden = " << join(teacher_hidden, num) << '\n'
    << "teacher-lr = " << real(teacher_lr) << '\n'
    << "teacher-momentum = " << real(teacher_momentum) << '\n'
    << "teacher-epochs = " << teacher_epochs << '\n'
    << "teacher-batch = " << teacher_batch << '\n'
    << "student-layers = " << student_layers << '\n'
    << "student-cells = " << student_cells << '\n'
    << "student-projection = " << student_projection << '\n'
    << "init-scale = " << real(init_scale) << '\n'
    << "forget-bias = " << real(forget_bias) << '\n'
    << "lr = " << real(lr) << '\n'
    << "momentum = " << real(momentum) << '\n'
    << "clip = " << real(clip) << '\n'
    << "max-epochs = " << max_epochs << '\n'
    << "streams = " << streams << '\n'
    << "window = " << window << '\n'
    << "min-improvement = " << real(min_improvement) << '\n'
    << "max-halvings = " << max_halvings << '\n'
    << "pretrain-switch = " << pretrain_switch << '\n'
    << "max-soft-epochs = " << max_soft_epochs << '\n'
    << "alpha = " << real(alpha) << '\n';
  return o.str();
}

std::string ExperimentConfig::digest() const { return to_hex(sha256(result_text())).substr(0, 16); }

void register_options(CLI::App& app, ExperimentConfig& c, std::optional<std::uint64_t>& seed) {
  app.set_config("--config", "", "Experiment config file (TOML/INI; unknown keys are errors)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Run only this master seed (overrides seeds)");
  app.add_flag("--deterministic,!--no-deterministic", c.deterministic,
               "Zero wall-clock fields so reruns are byte-identical")
      ->capture_default_str();
  app.add_flag("--quiet", c.quiet, "Suppress per-epoch progress on stderr");

  auto* d = "Data";
  app.add_option("--data-dir", c.data_dir, "Existing dataset directory (train/cv/test.dkds)")->group(d);
  app.add_option("--classes", c.classes)->group(d)->capture_default_str();
  app.add_option("--feature-dim", c.feature_dim)->group(d)->capture_default_str();
  app.add_option("--self-loop", c.self_loop)->group(d)->capture_default_str();
  app.add_option("--noise", c.noise)->group(d)->capture_default_str();
  app.add_option("--centroid-scale", c.centroid_scale)->group(d)->capture_default_str();
  app.add_option("--blend-frames", c.blend_frames)->group(d)->capture_default_str();
  app.add_option("--min-length", c.min_length)->group(d)->capture_default_str();
  app.add_option("--max-length", c.max_length)->group(d)->capture_default_str();
  app.add_option("--train-utts", c.train_utts)->group(d)->capture_default_str();
  app.add_option("--cv-utts", c.cv_utts)->group(d)->capture_default_str();
  app.add_option("--test-utts", c.test_utts)->group(d)->capture_default_str();

  auto* t = "Teacher";
  app.add_option("--teacher-hidden", c.teacher_hidden)->group(t)->capture_default_str();
  app.add_option("--teacher-lr", c.teacher_lr)->group(t)->capture_default_str();
  app.add_option("--teacher-momentum", c.teacher_momentum)->group(t)->capture_default_str();
  app.add_option("--teacher-epochs", c.teacher_epochs)->group(t)->capture_default_str();
  app.add_option("--teacher-batch", c.teacher_batch)->group(t)->capture_default_str();

  auto* s = "Student";
  app.add_option("--student-layers", c.student_layers)->group(s)->capture_default_str();
  app.add_option("--student-cells", c.student_cells)->group(s)->capture_default_str();
  app.add_option("--student-projection", c.student_projection)->group(s)->capture_default_str();
  app.add_option("--init-scale", c.init_scale)->group(s)->capture_default_str();
  app.add_option("--forget-bias", c.forget_bias)->group(s)->capture_default_str();
  app.add_option("--lr", c.lr)->group(s)->capture_default_str();
  app.add_option("--momentum", c.momentum)->group(s)->capture_default_str();
  app.add_option("--clip", c.clip)->group(s)->capture_default_str();
  app.add_option("--max-epochs", c.max_epochs)->group(s)->capture_default_str();
  app.add_option("--streams", c.streams)->group(s)->capture_default_str();
  app.add_option("--window", c.window)->group(s)->capture_default_str();
  app.add_option("--min-improvement", c.min_improvement)->group(s)->capture_default_str();
  app.add_option("--max-halvings", c.max_halvings)->group(s)->capture_default_str();
  app.add_option("--pretrain-switch", c.pretrain_switch,
                 "Soft epochs before switching to hard targets (-1: on plateau)")
      ->group(s)->capture_default_str();
  app.add_option("--max-soft-epochs", c.max_soft_epochs)->group(s)->capture_default_str();

  auto* x = "Sweep";
  app.add_option("--regimes", c.regimes, "Subset of hard, soft, reg, pretrain, logitmatch")
      ->group(x)->capture_default_str();
  app.add_option("--temperatures", c.temperatures)->group(x)->capture_default_str();
  app.add_option("--alpha", c.alpha, "Weight of the hard term in reg")->group(x)->capture_default_str();
  app.add_option("--seeds", c.seeds)->group(x)->capture_default_str();
}

std::filesystem::path Layout::seed_dir(std::uint64_t seed) const {
  return root_ / ("seed" + std::to_string(seed));
}

std::filesystem::path Layout::data_dir(const ExperimentConfig& config, std::uint64_t seed) const {
  if (!config.data_dir.empty()) return config.data_dir;
  return seed_dir(seed) / "data";
}

std::filesystem::path Layout::split_path(const ExperimentConfig& config, std::uint64_t seed,
                                         const std::string& split) const {
  return data_dir(config, seed) / (split + ".dkds");
}

std::filesystem::path Layout::teacher_dir(std::uint64_t seed) const { return seed_dir(seed) / "teacher"; }

std::filesystem::path Layout::soft_path(std::uint64_t seed, double temperature) const {
  return seed_dir(seed) / "soft" / ("T" + temperature_label(temperature)) / "train.dkst";
}

std::filesystem::path Layout::student_dir(std::uint64_t seed, Regime regime, double temperature) const {
  std::string name(regime_name(regime));
  if (regime != Regime::kHard) name += "-T" + temperature_label(temperature);
  return seed_dir(seed) / "student" / name;
}

std::filesystem::path Layout::variance_path(std::uint64_t seed) const {
  return seed_dir(seed) / "variance.tsv";
}

}  // namespace dkt::cli
