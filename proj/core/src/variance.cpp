// SPDX-License-Identifier: Apache-2.0
#include "dkt/variance.hpp"

#include <string>

#include "dkt/error.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/numeric.hpp"

namespace dkt {

GradVarianceAccumulator::GradVarianceAccumulator(std::size_t classes)
    : sum_target_(classes, 0.0), sum_output_(classes, 0.0), sum_sq_diff_(classes, 0.0) {}

void GradVarianceAccumulator::add(std::span<const double> target, std::span<const double> output) {
  if (target.size() != classes() || output.size() != classes())
    throw ShapeError("GradVarianceAccumulator::add: expected " + std::to_string(classes()) + " classes");
  for (std::size_t i = 0; i < classes(); ++i) {
    const double d = target[i] - output[i];
    sum_target_[i] += target[i];
    sum_output_[i] += output[i];
    sum_sq_diff_[i] += d * d;
  }
  ++count_;
}

GradVarianceAccumulator::Result GradVarianceAccumulator::finalize() const {
  if (count_ < 2)
    throw InvalidArgument("gradient variance needs at least 2 frames, have " + std::to_string(count_));
  Result r;
  r.frames = count_;
  const double n = static_cast<double>(count_);
  r.per_class.resize(classes());
  r.per_class_first_term.resize(classes());
  for (std::size_t i = 0; i < classes(); ++i) {
    const double first = sum_sq_diff_[i] / n;
    const double mean_gap = sum_target_[i] / n - sum_output_[i] / n;
    r.per_class_first_term[i] = first;
    r.per_class[i] = first - mean_gap * mean_gap;
    r.total += r.per_class[i];
    r.total_first_term += first;
  }
  return r;
}

VarianceReport gradient_variance_report(const ModelParams& model, const FrameDataset& split) {
  const Matrix logits = predict_logits(model, split);
  GradVarianceAccumulator acc(split.num_classes);
  for (std::size_t t = 0; t < split.frame_count(); ++t) {
    const auto y = softmax_t(logits.row(t), 1.0);
    acc.add(one_hot(split.labels[t], split.num_classes), y);
  }
  return acc.finalize();
}

VarianceReport gradient_variance_report(const ModelParams& model, const FrameDataset& split,
                                        const SoftTargetSet& targets) {
  if (targets.frame_count() != split.frame_count() || targets.class_count != split.num_classes)
    throw AlignmentError("soft targets do not match the split being reported");
  const Matrix logits = predict_logits(model, split);
  GradVarianceAccumulator acc(split.num_classes);
  for (std::size_t t = 0; t < split.frame_count(); ++t) {
    const auto y = softmax_t(logits.row(t), targets.temperature);
    acc.add(targets.row(t), y);
  }
  return acc.finalize();
}

}  // namespace dkt
