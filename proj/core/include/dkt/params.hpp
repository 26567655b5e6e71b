// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dkt/feedforward.hpp"
#include "dkt/lstm.hpp"

namespace dkt {

/// Either model family, as stored in a checkpoint.
using ModelParams = std::variant<FeedForwardParams, LstmProjParams>;

// Canonical tensor order (also the checkpoint payload order):
//   feed-forward: for each layer, weight then bias
//   LSTM: for each layer, input_weight, recurrent_weight, bias, projection;
//         then output weight, output bias
std::vector<Matrix*> tensors(FeedForwardParams& p);
std::vector<const Matrix*> tensors(const FeedForwardParams& p);
std::vector<Matrix*> tensors(LstmProjParams& p);
std::vector<const Matrix*> tensors(const LstmProjParams& p);

template <typename Params>
std::size_t parameter_count(const Params& p) {
  std::size_t n = 0;
  for (const Matrix* t : tensors(p)) n += t->size();
  return n;
}

template <typename Params>
std::vector<double> flatten(const Params& p) {
  std::vector<double> out;
  out.reserve(parameter_count(p));
  for (const Matrix* t : tensors(p)) out.insert(out.end(), t->values().begin(), t->values().end());
  return out;
}

/// Overwrites the parameters of `p` from `values` in canonical order.
/// Throws ShapeError if the count does not match.
void unflatten(FeedForwardParams& p, std::span<const double> values);
void unflatten(LstmProjParams& p, std::span<const double> values);

/// Same shapes as `p`, all zero.
template <typename Params>
Params zeros_like(const Params& p) {
  Params z = p;
  for (Matrix* t : tensors(z)) t->fill(0.0);
  return z;
}

/// Global L2 norm over all tensors.
template <typename Params>
double global_norm(const Params& p) {
  double sum = 0.0;
  for (const Matrix* t : tensors(p))
    for (double v : t->values()) sum += v * v;
  return std::sqrt(sum);
}

/// FNV-1a over the bit patterns of every parameter.
std::uint64_t fingerprint(const FeedForwardParams& p);
std::uint64_t fingerprint(const LstmProjParams& p);

}  // namespace dkt
