// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dkt/feedforward.hpp"
#include "dkt/matrix.hpp"

namespace dkt {

class Rng;

/// One LSTM layer with a recurrent projection and no peepholes:
///
///   a_t = W_x x_t + W_r r_{t-1} + b         (gate blocks: input, forget, cell, output)
///   i = sigm(a_i)  f = sigm(a_f)  g = tanh(a_c)  o = sigm(a_o)
///   c_t = f * c_{t-1} + i * g
///   m_t = o * tanh(c_t)
///   r_t = W_p m_t
///
/// r_t is both the layer output and the only recurrent input.
struct LstmLayerParams {
  Matrix input_weight;      // 4C x in
  Matrix recurrent_weight;  // 4C x P
  Matrix bias;              // 1 x 4C
  Matrix projection;        // P x C

  std::size_t input_dim() const noexcept { return input_weight.cols(); }
  std::size_t cell_dim() const noexcept { return projection.cols(); }
  std::size_t proj_dim() const noexcept { return projection.rows(); }
  friend bool operator==(const LstmLayerParams&, const LstmLayerParams&) = default;
};

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellInput = 2, kOutputGate = 3 };

struct LstmShape {
  std::size_t input_dim = 20;
  std::size_t layers = 1;
  std::size_t cells = 64;
  std::size_t projection = 32;
  std::size_t classes = 10;
  friend bool operator==(const LstmShape&, const LstmShape&) = default;
};

/// Stacked LSTM-projection layers followed by an affine output layer on the
/// last projection.
struct LstmProjParams {
  std::vector<LstmLayerParams> layers;
  DenseLayer output;

  LstmShape shape() const;
  std::size_t input_dim() const { return layers.front().input_dim(); }
  std::size_t num_classes() const noexcept { return output.output_dim(); }
  friend bool operator==(const LstmProjParams&, const LstmProjParams&) = default;
};

/// Zero parameters of the given shape. Throws InvalidArgument if
/// projection > cells or any dimension is zero.
LstmProjParams make_lstm(const LstmShape& shape);

/// Uniform weights in [-scale, scale]; biases zero except the forget gate,
/// which starts at `forget_bias`.
void init_lstm(LstmProjParams& params, Rng& rng, double scale = 0.05, double forget_bias = 1.0);

struct LayerState {
  std::vector<double> cell;    // C
  std::vector<double> output;  // P
  friend bool operator==(const LayerState&, const LayerState&) = default;
};

struct RecurrentState {
  std::vector<LayerState> layers;
  friend bool operator==(const RecurrentState&, const RecurrentState&) = default;
};

RecurrentState zero_state(const LstmProjParams& params);

/// Activations kept by lstm_forward for the matching lstm_backward call.
struct LstmCache {
  struct Layer {
    Matrix inputs;       // F x in
    Matrix prev_output;  // F x P, r_{t-1}
    Matrix prev_cell;    // F x C, c_{t-1}
    Matrix gates;        // F x 4C, post-nonlinearity
    Matrix cell;         // F x C
    Matrix cell_tanh;    // F x C
    Matrix cell_output;  // F x C, m_t
  };
  std::vector<Layer> layers;
  Matrix top_output;  // F x P, input to the output layer
  std::uint64_t params_fingerprint = 0;
  std::size_t frames = 0;
};

struct LstmForwardResult {
  Matrix logits;  // F x K
  RecurrentState state;
  LstmCache cache;
};

/// Runs the F frames of `window` in order starting from `state_in`.
LstmForwardResult lstm_forward(const LstmProjParams& params, const Matrix& window,
                               const RecurrentState& state_in);

struct LstmGradients {
  LstmProjParams params;
  /// Gradient with respect to the state passed into lstm_forward.
  RecurrentState state;
};

/// Exact BPTT inside the window. `state_grad_in` is the gradient arriving at
/// the window's final state; the truncated objective passes zeros, which is
/// what the two-argument overload does. Throws InvalidState when `cache` was
/// not produced from `params`.
LstmGradients lstm_backward(const LstmProjParams& params, const LstmCache& cache,
                            const Matrix& logit_grads, const RecurrentState& state_grad_in);
LstmGradients lstm_backward(const LstmProjParams& params, const LstmCache& cache,
                            const Matrix& logit_grads);

}  // namespace dkt
