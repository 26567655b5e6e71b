// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dkt/run_record.hpp"

namespace dkt::cli {

/// One completed training run found under an output tree.
struct RunSummary {
  std::uint64_t seed = 0;
  std::string model;        // "teacher" or "student"
  std::string regime;       // regime name
  std::string temperature;  // temperature label
  std::string status;       // "ok" or "aborted"
  std::string config;
  std::string train_fa, cv_fa, test_fa;  // as stored in eval.tsv
  std::filesystem::path dir;
  RunRecord record;
};

/// Table-1 style row label, e.g. "DNN", "RNN-0", "RNN-T2 (reg.)".
std::string row_label(const RunSummary& run);
/// Target arrangement column: "Hard", "Soft", "Soft + Hard", "Soft, Hard", "Logits".
std::string targets_label(const std::string& regime);

/// Scans seed*/teacher and seed*/student/* in a stable order.
/// Throws IoError when the directory is missing or holds no completed run.
std::vector<RunSummary> collect_runs(const std::filesystem::path& root);

struct VarianceEntry {
  std::uint64_t seed = 0;
  std::string targets;
  std::string temperature;
  double var = 0.0;
};
std::vector<VarianceEntry> collect_variance(const std::filesystem::path& root);

std::string format_report_text(const std::vector<RunSummary>& runs,
                               const std::vector<VarianceEntry>& variance);

/// CSV, one row per run. Columns:
/// seed,model,regime,temperature,targets,status,epochs,final_lr,train_fa,cv_fa,test_fa,config
std::string format_report_csv(const std::vector<RunSummary>& runs);

struct CsvRow {
  std::vector<std::string> cells;
};
/// Throws FormatError on a malformed file (offset of the offending line).
std::vector<CsvRow> parse_report_csv(std::string_view text);

/// Compares report.csv against the run directories it summarises and
/// returns one message per disagreement (empty when consistent).
std::vector<std::string> check_report_csv(const std::filesystem::path& root);

/// Writes report.txt and report.csv under root and returns the text table.
std::string write_report(const std::filesystem::path& root);

double median(std::vector<double> values);

}  // namespace dkt::cli
