// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "dkt/experiment.hpp"
#include "dkt/variance.hpp"

namespace dkt::cli {

/// Thread-safe progress sink for stderr.
class Progress {
 public:
  Progress(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}
  void line(const std::string& text);
  EpochCallback epoch_logger(std::string tag);

 private:
  std::ostream& out_;
  bool quiet_;
  std::mutex mutex_;
};

/// Eval summary file: "# dkt-eval v1" then "split<TAB>fa" lines.
struct EvalSummary {
  std::map<std::string, std::string> fa;  // split -> formatted percentage
};
std::string format_eval(const EvalSummary& summary);
EvalSummary parse_eval(std::string_view text);

/// Key/value metadata written next to every trained model.
using RunInfo = std::map<std::string, std::string>;
std::string format_run_info(const RunInfo& info);
RunInfo parse_run_info(std::string_view text);

void write_config_snapshot(const ExperimentConfig& config);

void generate_data(const ExperimentConfig& config, std::uint64_t seed, Progress& progress);
void train_teacher(const ExperimentConfig& config, std::uint64_t seed, Progress& progress);
void export_soft(const ExperimentConfig& config, std::uint64_t seed, double temperature,
                 Progress& progress);
void train_student(const ExperimentConfig& config, std::uint64_t seed, Regime regime,
                   double temperature, Progress& progress);

struct VarianceRow {
  std::string targets;  // "hard" or "soft"
  double temperature = 1.0;
  VarianceReport report;
};
/// Fresh student (same initialisation as training) against hard labels and
/// every configured temperature's soft targets, on the training split.
std::vector<VarianceRow> variance_report(const ExperimentConfig& config, std::uint64_t seed,
                                         Progress& progress);
std::string format_variance(std::uint64_t seed, const std::vector<VarianceRow>& rows);

EvalSummary evaluate_model(const ExperimentConfig& config, std::uint64_t seed,
                           const std::filesystem::path& model_path);

}  // namespace dkt::cli
