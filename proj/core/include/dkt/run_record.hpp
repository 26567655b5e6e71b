// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dkt {

/// One line of a training log.
struct EpochRecord {
  std::size_t epoch = 0;  // 1-based, strictly increasing
  std::string phase;      // objective used in this epoch (regime name)
  double learning_rate = 0.0;
  double train_fa = 0.0;
  double cv_fa = 0.0;
  double mean_loss = 0.0;
  double var_hard = 0.0;  // hard-target gradient variance on the training split
  double var_soft = 0.0;  // NaN when the run has no soft targets
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

struct RunRecord {
  std::vector<EpochRecord> epochs;
  /// Throws InvalidArgument unless epochs increase and the digest is constant.
  void validate() const;
};

// Tab-separated text: a "# dkt-run-record v1" line, a column header line,
// then one line per epoch. Floats are printed with fixed precision so a
// parse/format cycle reproduces the text exactly.
std::string format_run_record(const RunRecord& record);
std::string format_epoch_line(const EpochRecord& epoch);
/// Throws FormatError pointing at the offending line's byte offset.
RunRecord parse_run_record(std::string_view text);

/// Fixed-precision renderings shared by the record and report writers.
std::string format_percent(double value);  // 4 decimals
std::string format_real(double value);     // 8 significant decimals, "-" for NaN

}  // namespace dkt
