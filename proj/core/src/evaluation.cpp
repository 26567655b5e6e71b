// SPDX-License-Identifier: Apache-2.0
#include "dkt/evaluation.hpp"

#include <algorithm>
#include <string>

#include "dkt/error.hpp"
#include "dkt/numeric.hpp"

namespace dkt {

Matrix predict_logits(const FeedForwardParams& model, const FrameDataset& dataset) {
  return ff_forward(model, dataset.features);
}

Matrix predict_logits(const LstmProjParams& model, const FrameDataset& dataset) {
  Matrix logits(dataset.frame_count(), model.num_classes());
  for (const auto& utt : dataset.utterances) {
    const auto out = lstm_forward(model, dataset.utterance_features(utt), zero_state(model));
    std::copy(out.logits.values().begin(), out.logits.values().end(),
              logits.values().begin() + static_cast<std::ptrdiff_t>(utt.offset * model.num_classes()));
  }
  return logits;
}

Matrix predict_logits(const ModelParams& model, const FrameDataset& dataset) {
  return std::visit([&](const auto& p) { return predict_logits(p, dataset); }, model);
}

double frame_accuracy(const Matrix& logits, std::span<const std::uint32_t> labels,
                      std::span<const std::uint8_t> mask) {
  if (logits.rows() != labels.size()) throw ShapeError("frame_accuracy: logits and labels differ in length");
  if (!mask.empty() && mask.size() != labels.size())
    throw ShapeError("frame_accuracy: mask length mismatch");
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!mask.empty() && mask[t] == 0) continue;
    ++total;
    if (argmax(logits.row(t)) == labels[t]) ++correct;
  }
  if (total == 0) throw InvalidArgument("frame_accuracy: no frames to score");
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

double frame_accuracy(const ModelParams& model, const FrameDataset& dataset) {
  return frame_accuracy(predict_logits(model, dataset), dataset.labels);
}

}  // namespace dkt
