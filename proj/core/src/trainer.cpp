// SPDX-License-Identifier: Apache-2.0
#include "dkt/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dkt/batching.hpp"
#include "dkt/error.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/numeric.hpp"
#include "dkt/optimizer.hpp"
#include "dkt/random.hpp"
#include "dkt/variance.hpp"

namespace dkt {

namespace {

using Clock = std::chrono::steady_clock;

struct Phase {
  DistillLossSpec objective;
  bool pretrain_soft = false;
};

std::vector<Phase> plan_phases(const DistillLossSpec& spec) {
  if (spec.mode != Regime::kPretrain) return {{spec, false}};
  DistillLossSpec soft = DistillLossSpec::for_regime(Regime::kSoftOnly, spec.temperature, spec.alpha);
  DistillLossSpec hard = DistillLossSpec::for_regime(Regime::kHard, 1.0, spec.alpha);
  return {{soft, true}, {hard, false}};
}

struct Evaluation {
  double train_fa = 0.0;
  double cv_fa = 0.0;
  double var_hard = 0.0;
  double var_soft = std::numeric_limits<double>::quiet_NaN();
};

Evaluation evaluate(const ModelParams& model, const FrameDataset& train, const FrameDataset& cv,
                    const SoftTargetSet* soft) {
  Evaluation ev;
  const Matrix logits = predict_logits(model, train);
  ev.train_fa = frame_accuracy(logits, train.labels);
  GradVarianceAccumulator hard_acc(train.num_classes);
  GradVarianceAccumulator soft_acc(train.num_classes);
  for (std::size_t t = 0; t < train.frame_count(); ++t) {
    hard_acc.add(one_hot(train.labels[t], train.num_classes), softmax_t(logits.row(t), 1.0));
    if (soft != nullptr) soft_acc.add(soft->row(t), softmax_t(logits.row(t), soft->temperature));
  }
  if (hard_acc.count() >= 2) ev.var_hard = hard_acc.finalize().total;
  if (soft != nullptr && soft_acc.count() >= 2) ev.var_soft = soft_acc.finalize().total;
  ev.cv_fa = frame_accuracy(model, cv);
  return ev;
}

// Tracks the newbob rule for one phase.
struct Schedule {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t consecutive = 0;

  // True if the epoch counted as an improvement.
  bool observe(double cv_fa, double min_improvement) {
    if (cv_fa - best >= min_improvement) {
      best = cv_fa;
      consecutive = 0;
      return true;
    }
    ++consecutive;
    return false;
  }
};

double student_epoch(LstmProjParams& params, OptimizerState<LstmProjParams>& opt,
                     const DistillLossSpec& objective, const FrameDataset& train,
                     const SoftTargetSet* soft, const ScheduleConfig& schedule,
                     std::uint64_t shuffle_seed) {
  const SoftTargetSet* targets = objective.mode == Regime::kHard ? nullptr : soft;
  StreamBatcher batcher(train, targets, schedule.streams, schedule.window, shuffle_seed);
  std::vector<RecurrentState> states(schedule.streams, zero_state(params));
  LstmProjParams grads = zeros_like(params);
  const std::size_t k = params.num_classes();
  double loss_sum = 0.0;
  std::size_t frames = 0;

  while (auto batch = batcher.next_batch()) {
    for (Matrix* t : tensors(grads)) t->fill(0.0);
    // Streams are reduced in slot order so the sum is reproducible.
    for (std::size_t s = 0; s < batch->streams.size(); ++s) {
      const StreamWindow& win = batch->streams[s];
      if (!win.active) continue;
      if (win.reset) states[s] = zero_state(params);
      auto fwd = lstm_forward(params, win.features, states[s]);
      Matrix dz(win.features.rows(), k);
      for (std::size_t f = 0; f < win.mask.size(); ++f) {
        if (win.mask[f] == 0) continue;
        const std::span<const double> target =
            targets != nullptr ? win.soft_targets.row(f) : std::span<const double>{};
        const auto obj = frame_objective(objective, fwd.logits.row(f), win.labels[f], target);
        loss_sum += obj.loss;
        ++frames;
        std::copy(obj.grad.begin(), obj.grad.end(), dz.row(f).begin());
      }
      const auto back = lstm_backward(params, fwd.cache, dz);
      auto dst = tensors(grads);
      auto src = tensors(back.params);
      for (std::size_t i = 0; i < dst.size(); ++i) add_to(*dst[i], *src[i]);
      states[s] = std::move(fwd.state);
    }
    sgd_momentum_step(params, grads, opt, schedule.clip_norm);
  }
  if (!std::isfinite(loss_sum)) throw NumericOverflow("training loss became non-finite");
  return frames == 0 ? 0.0 : loss_sum / static_cast<double>(frames);
}

double teacher_epoch(FeedForwardParams& params, OptimizerState<FeedForwardParams>& opt,
                     const FrameDataset& train, const ScheduleConfig& schedule,
                     std::uint64_t shuffle_seed) {
  std::vector<std::size_t> order(train.frame_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(shuffle_seed);
  rng.shuffle(std::span(order));
  const std::size_t batch = std::max<std::size_t>(1, schedule.batch_frames);
  const std::size_t dim = train.feature_dim();
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t n = std::min(batch, order.size() - start);
    Matrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = train.features.row(order[start + i]);
      std::copy(src.begin(), src.end(), x.row(i).begin());
    }
    const Matrix logits = ff_forward(params, x);
    Matrix dz(n, params.output_dim());
    for (std::size_t i = 0; i < n; ++i) {
      const auto obj = hard_ce_loss_and_grad(logits.row(i), train.labels[order[start + i]]);
      loss_sum += obj.loss;
      std::copy(obj.grad.begin(), obj.grad.end(), dz.row(i).begin());
    }
    const auto grads = ff_backward(params, x, dz);
    sgd_momentum_step(params, grads.params, opt, schedule.clip_norm);
  }
  if (!std::isfinite(loss_sum)) throw NumericOverflow("teacher loss became non-finite");
  return order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

StudentRun run_training(const DistillLossSpec& spec, LstmProjParams init, const FrameDataset& train,
                        const FrameDataset& cv, const SoftTargetSet* train_soft,
                        const ScheduleConfig& schedule, const RunIdentity& id,
                        const EpochCallback& on_epoch) {
  spec.validate();
  if (init.input_dim() != train.feature_dim() || init.num_classes() != train.num_classes)
    throw ShapeError("student shape does not match the training data");
  if (needs_soft_targets(spec.mode)) {
    if (train_soft == nullptr)
      throw AlignmentError(std::string("regime ") + std::string(regime_name(spec.mode)) +
                           " needs soft targets");
    if (train_soft->temperature != spec.temperature)
      throw AlignmentError("soft targets were generated at T = " +
                           std::to_string(train_soft->temperature) + ", regime uses T = " +
                           std::to_string(spec.temperature));
  }

  StudentRun run;
  run.model = std::move(init);
  const std::uint64_t shuffle_seed = derive_seed(id.seed, SeedStream::kShuffle);
  std::size_t global_epoch = 0;

  for (const Phase& phase : plan_phases(spec)) {
    OptimizerState<LstmProjParams> opt(schedule.learning_rate, schedule.momentum, run.model);
    Schedule rule;
    std::size_t limit = schedule.max_epochs;
    if (phase.pretrain_soft)
      limit = schedule.pretrain_switch_epoch.value_or(schedule.max_soft_epochs);

    for (std::size_t e = 0; e < limit; ++e) {
      const auto start = Clock::now();
      const double lr_used = opt.learning_rate;
      LstmProjParams last_good = run.model;
      EpochRecord rec;
      try {
        rec.mean_loss = student_epoch(run.model, opt, phase.objective, train, train_soft, schedule,
                                      derive_seed(shuffle_seed, global_epoch));
        const Evaluation ev = evaluate(run.model, train, cv, train_soft);
        rec.train_fa = ev.train_fa;
        rec.cv_fa = ev.cv_fa;
        rec.var_hard = ev.var_hard;
        rec.var_soft = ev.var_soft;
      } catch (const NumericOverflow& err) {
        run.model = std::move(last_good);
        run.aborted = true;
        run.diagnostic = "epoch " + std::to_string(global_epoch + 1) + ": " + err.what();
        return run;
      }
      ++global_epoch;
      rec.epoch = global_epoch;
      rec.phase = std::string(regime_name(phase.objective.mode));
      rec.learning_rate = lr_used;
      rec.wall_seconds = schedule.record_wall_clock ? seconds_since(start) : 0.0;
      rec.seed = id.seed;
      rec.config_digest = id.config_digest;
      run.record.epochs.push_back(rec);
      if (on_epoch) on_epoch(rec);

      if (!rule.observe(rec.cv_fa, schedule.min_improvement)) {
        if (phase.pretrain_soft && !schedule.pretrain_switch_epoch) break;
        opt.learning_rate *= 0.5;
        if (rule.consecutive >= schedule.max_halvings) break;
      }
    }
  }
  return run;
}

TeacherRun train_teacher(FeedForwardParams init, const FrameDataset& train, const FrameDataset& cv,
                         const ScheduleConfig& schedule, const RunIdentity& id,
                         const EpochCallback& on_epoch) {
  if (init.input_dim() != train.feature_dim() || init.output_dim() != train.num_classes)
    throw ShapeError("teacher shape does not match the training data");
  TeacherRun run;
  run.model = std::move(init);
  const std::uint64_t shuffle_seed = derive_seed(id.seed, SeedStream::kTeacherShuffle);
  OptimizerState<FeedForwardParams> opt(schedule.learning_rate, schedule.momentum, run.model);
  Schedule rule;
  for (std::size_t e = 0; e < schedule.max_epochs; ++e) {
    const auto start = Clock::now();
    const double lr_used = opt.learning_rate;
    FeedForwardParams last_good = run.model;
    EpochRecord rec;
    try {
      rec.mean_loss = teacher_epoch(run.model, opt, train, schedule, derive_seed(shuffle_seed, e));
      const Evaluation ev = evaluate(run.model, train, cv, nullptr);
      rec.train_fa = ev.train_fa;
      rec.cv_fa = ev.cv_fa;
      rec.var_hard = ev.var_hard;
      rec.var_soft = ev.var_soft;
    } catch (const NumericOverflow& err) {
      run.model = std::move(last_good);
      run.aborted = true;
      run.diagnostic = "epoch " + std::to_string(e + 1) + ": " + err.what();
      return run;
    }
    rec.epoch = e + 1;
    rec.phase = "hard";
    rec.learning_rate = lr_used;
    rec.wall_seconds = schedule.record_wall_clock ? seconds_since(start) : 0.0;
    rec.seed = id.seed;
    rec.config_digest = id.config_digest;
    run.record.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (!rule.observe(rec.cv_fa, schedule.min_improvement)) {
      opt.learning_rate *= 0.5;
      if (rule.consecutive >= schedule.max_halvings) break;
    }
  }
  return run;
}

}  // namespace dkt
