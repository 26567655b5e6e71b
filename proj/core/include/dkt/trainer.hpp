// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "dkt/dataset.hpp"
#include "dkt/distill.hpp"
#include "dkt/feedforward.hpp"
#include "dkt/lstm.hpp"
#include "dkt/run_record.hpp"

namespace dkt {

struct ScheduleConfig {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  double clip_norm = 5.0;
  std::size_t max_epochs = 30;
  /// Newbob-style rule: an epoch whose CV frame accuracy does not beat the
  /// best so far by this many points halves the learning rate; training stops
  /// after max_halvings such epochs in a row.
  double min_improvement = 0.1;
  std::size_t max_halvings = 3;
  std::size_t streams = 4;
  std::size_t window = 20;
  /// Feed-forward training only: frames per update.
  std::size_t batch_frames = 80;
  /// Pretrain: epochs of soft-target training before switching to hard
  /// targets. nullopt switches at the first soft epoch that fails to improve
  /// CV accuracy, capped at max_soft_epochs.
  std::optional<std::size_t> pretrain_switch_epoch;
  std::size_t max_soft_epochs = 30;
  /// When false, records carry zero wall-clock so reruns are byte-identical.
  bool record_wall_clock = false;
};

struct RunIdentity {
  std::uint64_t seed = 0;
  std::string config_digest;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

struct StudentRun {
  LstmProjParams model;
  RunRecord record;
  /// Set when a numeric failure stopped the run; `model` is then the last
  /// parameters that completed an epoch.
  bool aborted = false;
  std::string diagnostic;
};

/// Trains an LSTM student under `spec` with multi-stream truncated BPTT.
/// `train_soft` must cover `train` for every regime except kHard. The utterance
/// order for each epoch is drawn from a seed derived from `id.seed`.
StudentRun run_training(const DistillLossSpec& spec, LstmProjParams init, const FrameDataset& train,
                        const FrameDataset& cv, const SoftTargetSet* train_soft,
                        const ScheduleConfig& schedule, const RunIdentity& id,
                        const EpochCallback& on_epoch = {});

struct TeacherRun {
  FeedForwardParams model;
  RunRecord record;
  bool aborted = false;
  std::string diagnostic;
};

/// Hard-target cross-entropy training of the feed-forward teacher on
/// frame-shuffled minibatches, with the same optimiser and schedule rule.
TeacherRun train_teacher(FeedForwardParams init, const FrameDataset& train, const FrameDataset& cv,
                         const ScheduleConfig& schedule, const RunIdentity& id,
                         const EpochCallback& on_epoch = {});

}  // namespace dkt
