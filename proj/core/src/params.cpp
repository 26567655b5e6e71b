// SPDX-License-Identifier: Apache-2.0
#include "dkt/params.hpp"

#include <bit>
#include <string>

#include "dkt/error.hpp"

namespace dkt {

std::vector<Matrix*> tensors(FeedForwardParams& p) {
  std::vector<Matrix*> out;
  for (auto& layer : p.layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Matrix*> tensors(const FeedForwardParams& p) {
  std::vector<const Matrix*> out;
  for (const auto& layer : p.layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<Matrix*> tensors(LstmProjParams& p) {
  std::vector<Matrix*> out;
  for (auto& layer : p.layers) {
    out.push_back(&layer.input_weight);
    out.push_back(&layer.recurrent_weight);
    out.push_back(&layer.bias);
    out.push_back(&layer.projection);
  }
  out.push_back(&p.output.weight);
  out.push_back(&p.output.bias);
  return out;
}

std::vector<const Matrix*> tensors(const LstmProjParams& p) {
  std::vector<const Matrix*> out;
  for (const auto& layer : p.layers) {
    out.push_back(&layer.input_weight);
    out.push_back(&layer.recurrent_weight);
    out.push_back(&layer.bias);
    out.push_back(&layer.projection);
  }
  out.push_back(&p.output.weight);
  out.push_back(&p.output.bias);
  return out;
}

namespace {

template <typename Params>
void unflatten_impl(Params& p, std::span<const double> values) {
  const std::size_t n = parameter_count(p);
  if (values.size() != n)
    throw ShapeError("unflatten: got " + std::to_string(values.size()) + " values for " +
                     std::to_string(n) + " parameters");
  std::size_t pos = 0;
  for (Matrix* t : tensors(p))
    for (double& v : t->values()) v = values[pos++];
}

template <typename Params>
std::uint64_t fingerprint_impl(const Params& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Matrix* t : tensors(p)) {
    h = (h ^ t->rows()) * 0x100000001b3ULL;
    h = (h ^ t->cols()) * 0x100000001b3ULL;
    for (double v : t->values()) h = (h ^ std::bit_cast<std::uint64_t>(v)) * 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void unflatten(FeedForwardParams& p, std::span<const double> values) { unflatten_impl(p, values); }
void unflatten(LstmProjParams& p, std::span<const double> values) { unflatten_impl(p, values); }

std::uint64_t fingerprint(const FeedForwardParams& p) { return fingerprint_impl(p); }
std::uint64_t fingerprint(const LstmProjParams& p) { return fingerprint_impl(p); }

}  // namespace dkt
