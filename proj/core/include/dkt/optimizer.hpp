// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "dkt/error.hpp"
#include "dkt/params.hpp"

namespace dkt {

inline constexpr double kDefaultClipNorm = 5.0;

template <typename Params>
struct OptimizerState {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  Params velocity;

  OptimizerState(double lr, double mu, const Params& like)
      : learning_rate(lr), momentum(mu), velocity(zeros_like(like)) {}

  void reset_velocity() {
    for (Matrix* t : tensors(velocity)) t->fill(0.0);
  }
};

/// One SGD step with classical momentum after clipping the global gradient
/// norm to `clip_norm` (<= 0 disables clipping):
///   v <- momentum * v - lr * g;  p <- p + v
/// Returns the gradient norm before clipping.
template <typename Params>
double sgd_momentum_step(Params& params, const Params& grads, OptimizerState<Params>& opt,
                         double clip_norm = kDefaultClipNorm) {
  auto p = tensors(params);
  auto g = tensors(grads);
  auto v = tensors(opt.velocity);
  if (p.size() != g.size() || p.size() != v.size())
    throw ShapeError("sgd_momentum_step: tensor count mismatch");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!p[i]->same_shape(*g[i]) || !p[i]->same_shape(*v[i]))
      throw ShapeError("sgd_momentum_step: tensor " + std::to_string(i) + " shape mismatch");

  const double norm = global_norm(grads);
  if (!std::isfinite(norm)) throw NumericOverflow("sgd_momentum_step: non-finite gradient");
  const double scale = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;

  for (std::size_t i = 0; i < p.size(); ++i) {
    auto pv = p[i]->values();
    auto gv = g[i]->values();
    auto vv = v[i]->values();
    for (std::size_t j = 0; j < pv.size(); ++j) {
      vv[j] = opt.momentum * vv[j] - opt.learning_rate * (scale * gv[j]);
      pv[j] += vv[j];
    }
  }
  return norm;
}

}  // namespace dkt
