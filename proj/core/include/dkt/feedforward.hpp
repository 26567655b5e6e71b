// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dkt/matrix.hpp"

namespace dkt {

class Rng;

/// Affine layer: weight (out x in), bias (1 x out).
struct DenseLayer {
  Matrix weight;
  Matrix bias;

  std::size_t input_dim() const noexcept { return weight.cols(); }
  std::size_t output_dim() const noexcept { return weight.rows(); }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward teacher. Hidden layers use the logistic sigmoid; the last
/// layer emits raw logits.
struct FeedForwardParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().input_dim(); }
  std::size_t output_dim() const { return layers.back().output_dim(); }
  /// {input, hidden..., output}
  std::vector<std::size_t> dims() const;
  friend bool operator==(const FeedForwardParams&, const FeedForwardParams&) = default;
};

/// Zero-initialised network with layer widths `dims` = {input, hidden..., output}.
FeedForwardParams make_feedforward(std::span<const std::size_t> dims);

/// Uniform weights in [-scale, scale], zero biases.
void init_uniform(FeedForwardParams& params, Rng& rng, double scale = 0.05);

/// Logits for every row of `features` (frames x input_dim).
Matrix ff_forward(const FeedForwardParams& params, const Matrix& features);

struct FeedForwardGradients {
  FeedForwardParams params;
  Matrix inputs;
};

/// Backpropagates `logit_grads` (frames x K), the gradient of some scalar loss
/// with respect to the logits produced by ff_forward on `features`.
FeedForwardGradients ff_backward(const FeedForwardParams& params, const Matrix& features,
                                 const Matrix& logit_grads);

}  // namespace dkt
