// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/distill.hpp"
#include "dkt/params.hpp"

namespace dkt {

/// Running sums for the accumulated logit-gradient variance
///   Var(t) = sum_i { E_x (t_i - y_i)^2 - (E_x t_i - E_x y_i)^2 }.
class GradVarianceAccumulator {
 public:
  explicit GradVarianceAccumulator(std::size_t classes);

  void add(std::span<const double> target, std::span<const double> output);
  std::size_t count() const noexcept { return count_; }
  std::size_t classes() const noexcept { return sum_target_.size(); }

  struct Result {
    std::vector<double> per_class;             // full expression
    std::vector<double> per_class_first_term;  // E_x (t_i - y_i)^2
    double total = 0.0;
    double total_first_term = 0.0;
    std::size_t frames = 0;
  };
  /// Throws InvalidArgument with fewer than two samples.
  Result finalize() const;

 private:
  std::vector<double> sum_target_;
  std::vector<double> sum_output_;
  std::vector<double> sum_sq_diff_;
  std::size_t count_ = 0;
};

using VarianceReport = GradVarianceAccumulator::Result;

/// Variance against hard labels. Outputs are the model's softmax at T = 1.
VarianceReport gradient_variance_report(const ModelParams& model, const FrameDataset& split);
/// Variance against soft targets. Outputs are the model's softmax at the
/// targets' temperature, the same pair the soft loss differentiates.
VarianceReport gradient_variance_report(const ModelParams& model, const FrameDataset& split,
                                        const SoftTargetSet& targets);

}  // namespace dkt
