// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dkt/error.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/numeric.hpp"
#include "dkt/random.hpp"
#include "dkt/run_record.hpp"
#include "dkt/trainer.hpp"
#include "support/fixtures.hpp"

namespace dkt {
namespace {

LstmProjParams student(const LstmShape& shape, std::uint64_t seed) {
  auto p = make_lstm(shape);
  Rng rng(derive_seed(seed, SeedStream::kStudentInit));
  init_lstm(p, rng, 0.05, 1.0);
  return p;
}

ScheduleConfig quick_schedule(std::size_t epochs) {
  ScheduleConfig s;
  s.learning_rate = 5e-3;
  s.max_epochs = epochs;
  s.window = 5;
  s.streams = 3;
  return s;
}

// Epoch records with the phase column ignored.
std::vector<std::string> trajectory(const RunRecord& r) {
  std::vector<std::string> lines;
  for (auto e : r.epochs) {
    e.phase.clear();
    lines.push_back(format_epoch_line(e));
  }
  return lines;
}

struct Fixture {
  FrameDataset train = test::make_dataset({7, 12, 5, 9, 11, 6}, 3, 3, 1);
  FrameDataset cv = test::make_dataset({8, 6}, 3, 3, 2);
  LstmShape shape{3, 1, 4, 2, 3};
};

TEST(RunTraining, SoftOnlyWithOneHotTargetsEqualsHard) {
  Fixture f;
  const auto soft = test::one_hot_targets(f.train, 1.0);
  const RunIdentity id{3, "digest"};
  const auto hard = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 3), f.train,
                                 f.cv, &soft, quick_schedule(4), id);
  const auto so = run_training(DistillLossSpec::for_regime(Regime::kSoftOnly, 1.0), student(f.shape, 3),
                               f.train, f.cv, &soft, quick_schedule(4), id);
  EXPECT_EQ(hard.model, so.model);
  EXPECT_EQ(trajectory(hard.record), trajectory(so.record));
  EXPECT_EQ(so.record.epochs.front().phase, "soft");
}

TEST(RunTraining, PretrainWithSwitchZeroEqualsHard) {
  Fixture f;
  const auto soft = test::one_hot_targets(f.train, 2.0);
  auto sched = quick_schedule(4);
  sched.pretrain_switch_epoch = 0;
  const RunIdentity id{5, "digest"};
  const auto hard = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 5), f.train,
                                 f.cv, &soft, sched, id);
  const auto pre = run_training(DistillLossSpec::for_regime(Regime::kPretrain, 2.0), student(f.shape, 5),
                                f.train, f.cv, &soft, sched, id);
  EXPECT_EQ(hard.model, pre.model);
  EXPECT_EQ(format_run_record(hard.record), format_run_record(pre.record));
}

TEST(RunTraining, PretrainFirstPhaseMatchesSoftOnly) {
  Fixture f;
  Rng rng(8);
  auto soft = test::one_hot_targets(f.train, 2.0);
  for (std::size_t t = 0; t < soft.frame_count(); ++t) {
    std::vector<double> z(3);
    for (double& v : z) v = rng.normal();
    const auto p = softmax_t(z, 2.0);
    std::copy(p.begin(), p.end(), soft.probs.row(t).begin());
  }
  auto sched = quick_schedule(6);
  sched.pretrain_switch_epoch = 2;
  const RunIdentity id{2, "d"};
  const auto pre = run_training(DistillLossSpec::for_regime(Regime::kPretrain, 2.0), student(f.shape, 2),
                                f.train, f.cv, &soft, sched, id);
  auto soft_sched = sched;
  soft_sched.max_epochs = 2;
  const auto so = run_training(DistillLossSpec::for_regime(Regime::kSoftOnly, 2.0), student(f.shape, 2),
                               f.train, f.cv, &soft, soft_sched, id);
  ASSERT_GE(pre.record.epochs.size(), 3u);
  ASSERT_EQ(so.record.epochs.size(), 2u);
  for (std::size_t e = 0; e < 2; ++e) {
    EXPECT_EQ(format_epoch_line(pre.record.epochs[e]), format_epoch_line(so.record.epochs[e]));
  }
  EXPECT_EQ(pre.record.epochs[2].phase, "hard");
  // The hard phase restarts from the initial learning rate.
  EXPECT_EQ(pre.record.epochs[2].learning_rate, sched.learning_rate);
}

TEST(RunTraining, AutoSwitchAtFirstNonImprovingSoftEpoch) {
  Fixture f;
  const auto soft = test::one_hot_targets(f.train, 1.0);
  auto sched = quick_schedule(3);
  sched.learning_rate = 1e-9;  // CV accuracy cannot move
  sched.max_soft_epochs = 10;
  const auto pre = run_training(DistillLossSpec::for_regime(Regime::kPretrain, 1.0), student(f.shape, 1),
                                f.train, f.cv, &soft, sched, {1, "d"});
  // Epoch 1 improves on -inf, epoch 2 does not and ends the soft phase.
  ASSERT_GE(pre.record.epochs.size(), 3u);
  EXPECT_EQ(pre.record.epochs[0].phase, "soft");
  EXPECT_EQ(pre.record.epochs[1].phase, "soft");
  EXPECT_EQ(pre.record.epochs[2].phase, "hard");
}

TEST(RunTraining, NewbobHalvesAndStops) {
  Fixture f;
  auto sched = quick_schedule(20);
  sched.learning_rate = 1e-9;
  const auto run = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 1), f.train,
                                f.cv, nullptr, sched, {1, "d"});
  // One improving epoch, then three failures in a row.
  ASSERT_EQ(run.record.epochs.size(), 4u);
  EXPECT_EQ(run.record.epochs[1].learning_rate, 1e-9);
  EXPECT_EQ(run.record.epochs[2].learning_rate, 0.5e-9);
  EXPECT_EQ(run.record.epochs[3].learning_rate, 0.25e-9);
}

TEST(RunTraining, DeterministicAcrossReruns) {
  Fixture f;
  const auto a = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 9), f.train, f.cv,
                              nullptr, quick_schedule(3), {9, "x"});
  const auto b = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 9), f.train, f.cv,
                              nullptr, quick_schedule(3), {9, "x"});
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(format_run_record(a.record), format_run_record(b.record));
  EXPECT_NO_THROW(a.record.validate());
  for (const auto& e : a.record.epochs) {
    EXPECT_EQ(e.wall_seconds, 0.0);
    EXPECT_EQ(e.seed, 9u);
    EXPECT_TRUE(std::isnan(e.var_soft));
  }
}

TEST(RunTraining, RequiresMatchingSoftTargets) {
  Fixture f;
  const auto t1 = test::one_hot_targets(f.train, 1.0);
  EXPECT_THROW(run_training(DistillLossSpec::for_regime(Regime::kSoftOnly, 2.0), student(f.shape, 1), f.train,
                            f.cv, &t1, quick_schedule(1), {1, "d"}),
               AlignmentError);
  EXPECT_THROW(run_training(DistillLossSpec::for_regime(Regime::kRegularized, 1.0), student(f.shape, 1),
                            f.train, f.cv, nullptr, quick_schedule(1), {1, "d"}),
               AlignmentError);
  EXPECT_THROW(run_training(DistillLossSpec::for_regime(Regime::kHard), student({4, 1, 4, 2, 3}, 1), f.train,
                            f.cv, nullptr, quick_schedule(1), {1, "d"}),
               ShapeError);
}

TEST(RunTraining, NumericFailureKeepsLastGoodEpoch) {
  Fixture f;
  auto sched = quick_schedule(5);
  sched.clip_norm = 0.0;
  sched.learning_rate = 1e300;
  const auto run = run_training(DistillLossSpec::for_regime(Regime::kHard), student(f.shape, 4), f.train,
                                f.cv, nullptr, sched, {4, "d"});
  EXPECT_TRUE(run.aborted);
  EXPECT_FALSE(run.diagnostic.empty());
  for (const Matrix* t : tensors(run.model)) EXPECT_TRUE(t->all_finite());
}

TEST(RunTraining, SeparableToyReachesNinetyNinePercent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto train = test::separable_toy(100, 10, 2, seed);
    const auto cv = test::separable_toy(20, 10, 2, seed + 100);
    auto sched = quick_schedule(50);
    sched.learning_rate = 5e-3;
    sched.window = 10;
    sched.streams = 4;
    double best = 0.0;
    const auto run = run_training(DistillLossSpec::for_regime(Regime::kHard), student({2, 1, 4, 2, 2}, seed),
                                  train, cv, nullptr, sched, {seed, "toy"},
                                  [&](const EpochRecord& e) { best = std::max(best, e.cv_fa); });
    EXPECT_GE(best, 99.0) << "seed " << seed;
    EXPECT_LE(run.record.epochs.size(), 50u);
  }
}

TEST(TrainTeacher, LearnsSeparableToyDeterministically) {
  const auto train = test::separable_toy(30, 10, 2, 1);
  const auto cv = test::separable_toy(10, 10, 2, 2);
  const std::vector<std::size_t> dims{2, 8, 2};
  auto init = make_feedforward(dims);
  Rng rng(derive_seed(1, SeedStream::kTeacherInit));
  init_uniform(init, rng, 0.05);
  ScheduleConfig sched;
  sched.learning_rate = 0.05;
  sched.max_epochs = 30;
  sched.batch_frames = 20;
  const auto a = train_teacher(init, train, cv, sched, {1, "t"});
  const auto b = train_teacher(init, train, cv, sched, {1, "t"});
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(format_run_record(a.record), format_run_record(b.record));
  EXPECT_GE(frame_accuracy(ModelParams{a.model}, cv), 99.0);
}

}  // namespace
}  // namespace dkt
