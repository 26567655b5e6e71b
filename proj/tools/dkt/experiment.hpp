// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dkt/distill.hpp"
#include "dkt/lstm.hpp"
#include "dkt/synth.hpp"
#include "dkt/trainer.hpp"

namespace CLI {
class App;
}

namespace dkt::cli {

/// Everything an experiment sweep needs. Each field is also a config-file
/// key and a command-line option of the same name (see register_options).
struct ExperimentConfig {
  // Data: a synthetic task per seed unless data_dir points at existing files.
  std::string data_dir;
  std::size_t classes = 10;
  std::size_t feature_dim = 20;
  double self_loop = 0.85;
  double noise = 1.0;
  double centroid_scale = 1.0;
  std::size_t blend_frames = 2;
  std::size_t min_length = 30;
  std::size_t max_length = 80;
  std::size_t train_utts = 600;
  std::size_t cv_utts = 200;
  std::size_t test_utts = 200;

  // Teacher.
  std::vector<std::size_t> teacher_hidden{128, 128};
  double teacher_lr = 0.01;
  double teacher_momentum = 0.9;
  std::size_t teacher_epochs = 100;
  std::size_t teacher_batch = 80;

  // Student.
  std::size_t student_layers = 1;
  std::size_t student_cells = 64;
  std::size_t student_projection = 32;
  double init_scale = 0.05;
  double forget_bias = 1.0;
  double lr = 1e-3;
  double momentum = 0.9;
  double clip = 5.0;
  std::size_t max_epochs = 30;
  std::size_t streams = 4;
  std::size_t window = 20;
  double min_improvement = 0.1;
  std::size_t max_halvings = 3;
  int pretrain_switch = -1;  // -1: switch when the soft phase plateaus
  std::size_t max_soft_epochs = 30;

  // Sweep.
  std::vector<std::string> regimes{"hard", "soft", "reg", "pretrain"};
  std::vector<double> temperatures{1.0, 2.0};
  double alpha = 0.5;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  // Run control (not part of the digest).
  std::string out = "dkt-out";
  bool deterministic = true;
  bool quiet = false;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;

  SynthTaskSpec task() const;
  std::vector<std::size_t> teacher_dims() const;
  LstmShape student_shape() const;
  ScheduleConfig teacher_schedule() const;
  ScheduleConfig student_schedule() const;
  std::vector<Regime> regime_list() const;

  /// "key = value" lines for every field, in a fixed order. Loadable with --config.
  std::string canonical_text() const;
  /// The subset of canonical_text() that can change a single run's outputs;
  /// the sweep lists (regimes, temperatures, seeds) are excluded.
  std::string result_text() const;
  /// First 16 hex digits of the SHA-256 of result_text().
  std::string digest() const;
};

/// Adds every ExperimentConfig field to `app` as --<key>, plus the global
/// --config, --seed, --out, --deterministic and --quiet flags.
void register_options(CLI::App& app, ExperimentConfig& config, std::optional<std::uint64_t>& seed);

/// Directory layout of an output tree.
class Layout {
 public:
  explicit Layout(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path seed_dir(std::uint64_t seed) const;
  std::filesystem::path data_dir(const ExperimentConfig& config, std::uint64_t seed) const;
  std::filesystem::path split_path(const ExperimentConfig& config, std::uint64_t seed,
                                   const std::string& split) const;
  std::filesystem::path teacher_dir(std::uint64_t seed) const;
  std::filesystem::path soft_path(std::uint64_t seed, double temperature) const;
  std::filesystem::path student_dir(std::uint64_t seed, Regime regime, double temperature) const;
  std::filesystem::path variance_path(std::uint64_t seed) const;

 private:
  std::filesystem::path root_;
};

/// The temperature as it appears in paths and tables: "1", "2", "0.5".
std::string temperature_label(double t);

}  // namespace dkt::cli
