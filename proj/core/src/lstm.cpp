// SPDX-License-Identifier: Apache-2.0
#include "dkt/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkt/error.hpp"
#include "dkt/numeric.hpp"
#include "dkt/params.hpp"
#include "dkt/random.hpp"

namespace dkt {

LstmShape LstmProjParams::shape() const {
  LstmShape s;
  s.input_dim = layers.empty() ? 0 : layers.front().input_dim();
  s.layers = layers.size();
  s.cells = layers.empty() ? 0 : layers.front().cell_dim();
  s.projection = layers.empty() ? 0 : layers.front().proj_dim();
  s.classes = output.output_dim();
  return s;
}

LstmProjParams make_lstm(const LstmShape& shape) {
  if (shape.input_dim == 0 || shape.layers == 0 || shape.cells == 0 || shape.projection == 0 ||
      shape.classes == 0)
    throw InvalidArgument("make_lstm: every dimension must be positive");
  if (shape.projection > shape.cells)
    throw InvalidArgument("make_lstm: projection dim " + std::to_string(shape.projection) +
                          " exceeds cell dim " + std::to_string(shape.cells));
  LstmProjParams p;
  const std::size_t c = shape.cells;
  const std::size_t r = shape.projection;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    const std::size_t in = l == 0 ? shape.input_dim : r;
    p.layers.push_back({Matrix(4 * c, in), Matrix(4 * c, r), Matrix(1, 4 * c), Matrix(r, c)});
  }
  p.output = {Matrix(shape.classes, r), Matrix(1, shape.classes)};
  return p;
}

void init_lstm(LstmProjParams& params, Rng& rng, double scale, double forget_bias) {
  for (Matrix* t : tensors(params))
    for (double& v : t->values()) v = rng.uniform(-scale, scale);
  for (auto& layer : params.layers) {
    const std::size_t c = layer.cell_dim();
    layer.bias.fill(0.0);
    for (std::size_t j = 0; j < c; ++j) layer.bias(0, kForgetGate * c + j) = forget_bias;
  }
  params.output.bias.fill(0.0);
}

RecurrentState zero_state(const LstmProjParams& params) {
  RecurrentState s;
  for (const auto& layer : params.layers)
    s.layers.push_back({std::vector<double>(layer.cell_dim(), 0.0),
                        std::vector<double>(layer.proj_dim(), 0.0)});
  return s;
}

namespace {

void check_state(const LstmProjParams& params, const RecurrentState& state, const char* what) {
  if (state.layers.size() != params.layers.size())
    throw ShapeError(std::string(what) + ": state has " + std::to_string(state.layers.size()) +
                     " layers, model has " + std::to_string(params.layers.size()));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    if (state.layers[l].cell.size() != params.layers[l].cell_dim() ||
        state.layers[l].output.size() != params.layers[l].proj_dim())
      throw ShapeError(std::string(what) + ": state dims do not match layer " + std::to_string(l));
  }
}

}  // namespace

LstmForwardResult lstm_forward(const LstmProjParams& params, const Matrix& window,
                               const RecurrentState& state_in) {
  if (params.layers.empty()) throw InvalidArgument("lstm_forward: model has no layers");
  if (window.cols() != params.input_dim())
    throw ShapeError("lstm_forward: window has " + std::to_string(window.cols()) +
                     " features, model expects " + std::to_string(params.input_dim()));
  check_state(params, state_in, "lstm_forward");

  const std::size_t frames = window.rows();
  LstmForwardResult result;
  result.state = state_in;
  auto& cache = result.cache;
  cache.frames = frames;
  cache.params_fingerprint = fingerprint(params);
  cache.layers.resize(params.layers.size());

  Matrix layer_input = window;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& p = params.layers[l];
    const std::size_t c = p.cell_dim();
    const std::size_t r = p.proj_dim();
    auto& lc = cache.layers[l];
    lc.prev_output = Matrix(frames, r);
    lc.prev_cell = Matrix(frames, c);
    lc.gates = Matrix(frames, 4 * c);
    lc.cell = Matrix(frames, c);
    lc.cell_tanh = Matrix(frames, c);
    lc.cell_output = Matrix(frames, c);
    Matrix output(frames, r);

    auto& st = result.state.layers[l];
    for (std::size_t t = 0; t < frames; ++t) {
      std::copy(st.output.begin(), st.output.end(), lc.prev_output.row(t).begin());
      std::copy(st.cell.begin(), st.cell.end(), lc.prev_cell.row(t).begin());

      auto a = lc.gates.row(t);
      std::copy(p.bias.values().begin(), p.bias.values().end(), a.begin());
      gemv_add(p.input_weight, layer_input.row(t), a);
      gemv_add(p.recurrent_weight, st.output, a);
      for (std::size_t j = 0; j < c; ++j) {
        a[kInputGate * c + j] = sigmoid(a[kInputGate * c + j]);
        a[kForgetGate * c + j] = sigmoid(a[kForgetGate * c + j]);
        a[kCellInput * c + j] = std::tanh(a[kCellInput * c + j]);
        a[kOutputGate * c + j] = sigmoid(a[kOutputGate * c + j]);
      }
      auto cell = lc.cell.row(t);
      auto ctanh = lc.cell_tanh.row(t);
      auto m = lc.cell_output.row(t);
      for (std::size_t j = 0; j < c; ++j) {
        cell[j] = a[kForgetGate * c + j] * st.cell[j] + a[kInputGate * c + j] * a[kCellInput * c + j];
        ctanh[j] = std::tanh(cell[j]);
        m[j] = a[kOutputGate * c + j] * ctanh[j];
      }
      auto out = output.row(t);
      gemv_add(p.projection, m, out);

      std::copy(cell.begin(), cell.end(), st.cell.begin());
      std::copy(out.begin(), out.end(), st.output.begin());
    }
    lc.inputs = std::move(layer_input);
    layer_input = std::move(output);
  }
  cache.top_output = std::move(layer_input);

  result.logits = Matrix(frames, params.num_classes());
  for (std::size_t t = 0; t < frames; ++t) {
    auto z = result.logits.row(t);
    std::copy(params.output.bias.values().begin(), params.output.bias.values().end(), z.begin());
    gemv_add(params.output.weight, cache.top_output.row(t), z);
  }
  if (!result.logits.all_finite()) throw NumericOverflow("lstm_forward: non-finite activation");
  return result;
}

LstmGradients lstm_backward(const LstmProjParams& params, const LstmCache& cache,
                            const Matrix& logit_grads) {
  return lstm_backward(params, cache, logit_grads, zero_state(params));
}

LstmGradients lstm_backward(const LstmProjParams& params, const LstmCache& cache,
                            const Matrix& logit_grads, const RecurrentState& state_grad_in) {
  if (cache.layers.size() != params.layers.size() ||
      cache.params_fingerprint != fingerprint(params))
    throw InvalidState("lstm_backward: cache was not produced by these parameters");
  const std::size_t frames = cache.frames;
  if (logit_grads.rows() != frames || logit_grads.cols() != params.num_classes())
    throw ShapeError("lstm_backward: logit gradients are " + std::to_string(logit_grads.rows()) +
                     "x" + std::to_string(logit_grads.cols()) + ", expected " +
                     std::to_string(frames) + "x" + std::to_string(params.num_classes()));
  check_state(params, state_grad_in, "lstm_backward");

  LstmGradients grads;
  grads.params = zeros_like(params);
  grads.state = zero_state(params);

  // Gradient reaching each layer's per-frame output r_t from above.
  Matrix d_output(frames, params.layers.back().proj_dim());
  for (std::size_t t = 0; t < frames; ++t) {
    outer_add(grads.params.output.weight, logit_grads.row(t), cache.top_output.row(t));
    add_to(grads.params.output.bias.values(), logit_grads.row(t));
    gemv_transpose_add(params.output.weight, logit_grads.row(t), d_output.row(t));
  }

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& p = params.layers[l];
    const auto& lc = cache.layers[l];
    auto& g = grads.params.layers[l];
    const std::size_t c = p.cell_dim();
    const std::size_t r = p.proj_dim();

    std::vector<double> d_rec(state_grad_in.layers[l].output);  // dL/dr_t from frame t + 1
    std::vector<double> d_cell_next(state_grad_in.layers[l].cell);
    std::vector<double> dr(r), dm(c), da(4 * c);
    Matrix d_input(frames, p.input_dim());

    for (std::size_t t = frames; t-- > 0;) {
      auto ext = d_output.row(t);
      for (std::size_t k = 0; k < r; ++k) dr[k] = ext[k] + d_rec[k];

      auto m = lc.cell_output.row(t);
      outer_add(g.projection, dr, m);
      std::fill(dm.begin(), dm.end(), 0.0);
      gemv_transpose_add(p.projection, dr, dm);

      auto gates = lc.gates.row(t);
      auto ctanh = lc.cell_tanh.row(t);
      auto cprev = lc.prev_cell.row(t);
      for (std::size_t j = 0; j < c; ++j) {
        const double ig = gates[kInputGate * c + j];
        const double fg = gates[kForgetGate * c + j];
        const double cg = gates[kCellInput * c + j];
        const double og = gates[kOutputGate * c + j];
        const double h = ctanh[j];
        const double dc = d_cell_next[j] + dm[j] * og * (1.0 - h * h);
        da[kInputGate * c + j] = dc * cg * ig * (1.0 - ig);
        da[kForgetGate * c + j] = dc * cprev[j] * fg * (1.0 - fg);
        da[kCellInput * c + j] = dc * ig * (1.0 - cg * cg);
        da[kOutputGate * c + j] = dm[j] * h * og * (1.0 - og);
        d_cell_next[j] = dc * fg;
      }

      outer_add(g.input_weight, da, lc.inputs.row(t));
      outer_add(g.recurrent_weight, da, lc.prev_output.row(t));
      add_to(g.bias.values(), da);
      gemv_transpose_add(p.input_weight, da, d_input.row(t));
      std::fill(d_rec.begin(), d_rec.end(), 0.0);
      gemv_transpose_add(p.recurrent_weight, da, d_rec);
    }
    grads.state.layers[l].cell = d_cell_next;
    grads.state.layers[l].output = d_rec;
    if (l > 0) d_output = std::move(d_input);
  }
  return grads;
}

}  // namespace dkt
