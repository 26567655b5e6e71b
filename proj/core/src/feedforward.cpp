// SPDX-License-Identifier: Apache-2.0
#include "dkt/feedforward.hpp"

#include <string>

#include "dkt/error.hpp"
#include "dkt/numeric.hpp"
#include "dkt/random.hpp"

namespace dkt {

std::vector<std::size_t> FeedForwardParams::dims() const {
  std::vector<std::size_t> d;
  if (layers.empty()) return d;
  d.push_back(input_dim());
  for (const auto& layer : layers) d.push_back(layer.output_dim());
  return d;
}

FeedForwardParams make_feedforward(std::span<const std::size_t> dims) {
  if (dims.size() < 2) throw InvalidArgument("make_feedforward: need at least input and output widths");
  FeedForwardParams p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] == 0 || dims[i + 1] == 0) throw InvalidArgument("make_feedforward: zero layer width");
    p.layers.push_back({Matrix(dims[i + 1], dims[i]), Matrix(1, dims[i + 1])});
  }
  return p;
}

void init_uniform(FeedForwardParams& params, Rng& rng, double scale) {
  for (auto& layer : params.layers) {
    for (double& w : layer.weight.values()) w = rng.uniform(-scale, scale);
    layer.bias.fill(0.0);
  }
}

namespace {

void check_input(const FeedForwardParams& params, const Matrix& features) {
  if (params.layers.empty()) throw InvalidArgument("feed-forward network has no layers");
  if (features.cols() != params.input_dim())
    throw ShapeError("feed-forward input has " + std::to_string(features.cols()) +
                     " columns, network expects " + std::to_string(params.input_dim()));
}

// activations[0] = features; activations[l + 1] = output of layer l.
std::vector<Matrix> forward_all(const FeedForwardParams& params, const Matrix& features) {
  std::vector<Matrix> acts;
  acts.reserve(params.layers.size() + 1);
  acts.push_back(features);
  const std::size_t frames = features.rows();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    const bool hidden = l + 1 < params.layers.size();
    Matrix out(frames, layer.output_dim());
    for (std::size_t t = 0; t < frames; ++t) {
      auto y = out.row(t);
      std::copy(layer.bias.values().begin(), layer.bias.values().end(), y.begin());
      gemv_add(layer.weight, acts.back().row(t), y);
      if (hidden)
        for (double& v : y) v = sigmoid(v);
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

}  // namespace

Matrix ff_forward(const FeedForwardParams& params, const Matrix& features) {
  check_input(params, features);
  auto acts = forward_all(params, features);
  if (!acts.back().all_finite()) throw NumericOverflow("ff_forward: non-finite logits");
  return std::move(acts.back());
}

FeedForwardGradients ff_backward(const FeedForwardParams& params, const Matrix& features,
                                 const Matrix& logit_grads) {
  check_input(params, features);
  if (logit_grads.rows() != features.rows() || logit_grads.cols() != params.output_dim())
    throw ShapeError("ff_backward: logit gradients are " + std::to_string(logit_grads.rows()) +
                     "x" + std::to_string(logit_grads.cols()) + ", expected " +
                     std::to_string(features.rows()) + "x" + std::to_string(params.output_dim()));
  const auto acts = forward_all(params, features);
  FeedForwardGradients grads;
  grads.params = params;
  for (auto& layer : grads.params.layers) {
    layer.weight.fill(0.0);
    layer.bias.fill(0.0);
  }

  const std::size_t frames = features.rows();
  Matrix delta = logit_grads;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& g = grads.params.layers[l];
    Matrix below(frames, layer.input_dim());
    for (std::size_t t = 0; t < frames; ++t) {
      outer_add(g.weight, delta.row(t), acts[l].row(t));
      add_to(g.bias.values(), delta.row(t));
      gemv_transpose_add(layer.weight, delta.row(t), below.row(t));
    }
    if (l > 0) {
      // Layer l's input is a sigmoid output h; dh/da = h (1 - h).
      for (std::size_t t = 0; t < frames; ++t) {
        auto d = below.row(t);
        auto h = acts[l].row(t);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= h[i] * (1.0 - h[i]);
      }
    }
    delta = std::move(below);
  }
  grads.inputs = std::move(delta);
  return grads;
}

}  // namespace dkt
