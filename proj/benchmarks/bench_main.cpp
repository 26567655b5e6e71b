// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "dkt/distill.hpp"
#include "dkt/feedforward.hpp"
#include "dkt/lstm.hpp"
#include "dkt/numeric.hpp"
#include "dkt/random.hpp"
#include "dkt/synth.hpp"
#include "dkt/variance.hpp"

namespace {

using namespace dkt;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

void BM_SoftmaxT(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const Matrix z = random_matrix(1, k, 1);
  for (auto _ : state) benchmark::DoNotOptimize(softmax_t(z.row(0), 2.0));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SoftmaxT)->Arg(10)->Arg(100)->Arg(1000);

void BM_CombinedLoss(benchmark::State& state) {
  const Matrix z = random_matrix(1, 10, 2);
  const auto p = softmax_t(random_matrix(1, 10, 3).row(0), 2.0);
  const auto hard = one_hot(3, 10);
  const auto spec = DistillLossSpec::for_regime(Regime::kRegularized, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(combined_loss_and_grad(z.row(0), hard, p, spec));
}
BENCHMARK(BM_CombinedLoss);

// Teacher forward and backward over one minibatch.
void BM_FeedForward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  auto p = make_feedforward(std::vector<std::size_t>{20, width, width, 10});
  Rng rng(4);
  init_uniform(p, rng, 0.05);
  const Matrix x = random_matrix(80, 20, 5);
  const Matrix dz = random_matrix(80, 10, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ff_forward(p, x));
    benchmark::DoNotOptimize(ff_backward(p, x, dz));
  }
  state.SetItemsProcessed(state.iterations() * 80);
}
BENCHMARK(BM_FeedForward)->Arg(32)->Arg(128);

// Student forward and BPTT over one 20-frame window.
void BM_LstmWindow(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  auto p = make_lstm({20, 1, cells, cells / 2, 10});
  Rng rng(7);
  init_lstm(p, rng, 0.05, 1.0);
  const Matrix x = random_matrix(20, 20, 8);
  const Matrix dz = random_matrix(20, 10, 9);
  for (auto _ : state) {
    const auto fwd = lstm_forward(p, x, zero_state(p));
    benchmark::DoNotOptimize(lstm_backward(p, fwd.cache, dz));
  }
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_LstmWindow)->Arg(16)->Arg(64);

void BM_VarianceReport(benchmark::State& state) {
  SynthTaskSpec spec;
  spec.train_utterances = 20;
  spec.cv_utterances = 2;
  spec.test_utterances = 2;
  const auto data = generate_synth(spec, 10);
  auto p = make_lstm({20, 1, 32, 16, 10});
  Rng rng(11);
  init_lstm(p, rng, 0.05, 1.0);
  const ModelParams model = p;
  for (auto _ : state) benchmark::DoNotOptimize(gradient_variance_report(model, data.train));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.train.frame_count()));
}
BENCHMARK(BM_VarianceReport);

}  // namespace

BENCHMARK_MAIN();
