// SPDX-License-Identifier: Apache-2.0
#include "dkt/distill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkt/error.hpp"
#include "dkt/numeric.hpp"

namespace dkt {

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kHard: return "hard";
    case Regime::kSoftOnly: return "soft";
    case Regime::kRegularized: return "reg";
    case Regime::kPretrain: return "pretrain";
    case Regime::kLogitMatch: return "logitmatch";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view name) {
  for (Regime r : {Regime::kHard, Regime::kSoftOnly, Regime::kRegularized, Regime::kPretrain,
                   Regime::kLogitMatch})
    if (regime_name(r) == name) return r;
  return std::nullopt;
}

bool needs_soft_targets(Regime regime) { return regime != Regime::kHard; }

DistillLossSpec DistillLossSpec::for_regime(Regime regime, double temperature, double alpha) {
  DistillLossSpec spec;
  spec.mode = regime;
  spec.alpha = alpha;
  spec.temperature = temperature;
  spec.scale_soft_by_t2 = regime == Regime::kRegularized;
  return spec;
}

void DistillLossSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("temperature must be positive, got " + std::to_string(temperature));
}

std::vector<double> soften_logits(std::span<const double> teacher_logits, double temperature) {
  return softmax_t(teacher_logits, temperature);
}

SoftTargetSet export_soft_targets(const FeedForwardParams& teacher, const FrameDataset& dataset,
                                  double temperature, const Sha256Digest& teacher_digest) {
  if (teacher.input_dim() != dataset.feature_dim())
    throw ShapeError("export_soft_targets: teacher expects " + std::to_string(teacher.input_dim()) +
                     " features, dataset has " + std::to_string(dataset.feature_dim()));
  if (teacher.output_dim() != dataset.num_classes)
    throw ShapeError("export_soft_targets: teacher has " + std::to_string(teacher.output_dim()) +
                     " outputs, dataset has " + std::to_string(dataset.num_classes) + " classes");
  const Matrix logits = ff_forward(teacher, dataset.features);
  SoftTargetSet set;
  set.temperature = temperature;
  set.class_count = teacher.output_dim();
  set.teacher_digest = teacher_digest;
  set.probs = Matrix(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const auto p = soften_logits(logits.row(t), temperature);
    auto out = set.probs.row(t);
    // Stored rows carry exactly the precision of the on-disk format.
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = static_cast<float>(p[k]);
  }
  return set;
}

LossAndGrad hard_ce_loss_and_grad(std::span<const double> student_logits, std::size_t label) {
  const auto target = one_hot(label, student_logits.size());
  return soft_ce_loss_and_grad(student_logits, target, 1.0, false);
}

LossAndGrad soft_ce_loss_and_grad(std::span<const double> student_logits,
                                  std::span<const double> soft_target, double temperature,
                                  bool scale_by_t2) {
  if (student_logits.size() != soft_target.size())
    throw ShapeError("soft_ce_loss_and_grad: " + std::to_string(student_logits.size()) +
                     " logits vs " + std::to_string(soft_target.size()) + " targets");
  const auto q = softmax_t(student_logits, temperature);
  LossAndGrad out;
  out.loss = cross_entropy(soft_target, q);
  out.grad = logit_gradient(soft_target, q);
  if (temperature != 1.0)
    for (double& g : out.grad) g /= temperature;
  if (scale_by_t2) {
    const double t2 = temperature * temperature;
    out.loss *= t2;
    for (double& g : out.grad) g *= t2;
  }
  return out;
}

LossAndGrad combined_loss_and_grad(std::span<const double> student_logits,
                                   std::span<const double> hard_target,
                                   std::span<const double> soft_target,
                                   const DistillLossSpec& spec) {
  spec.validate();
  if (hard_target.size() != student_logits.size() || soft_target.size() != student_logits.size())
    throw ShapeError("combined_loss_and_grad: inputs must all have length K");
  auto soft = soft_ce_loss_and_grad(student_logits, soft_target, spec.temperature,
                                    spec.scale_soft_by_t2);
  if (spec.alpha == 0.0) return soft;
  const auto hard = soft_ce_loss_and_grad(student_logits, hard_target, 1.0, false);
  LossAndGrad out;
  out.loss = spec.alpha * hard.loss + soft.loss;
  out.grad.resize(student_logits.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i)
    out.grad[i] = spec.alpha * hard.grad[i] + soft.grad[i];
  return out;
}

LossAndGrad logit_matching_loss_and_grad(std::span<const double> student_logits,
                                         std::span<const double> teacher_logits) {
  if (student_logits.size() != teacher_logits.size())
    throw ShapeError("logit_matching_loss_and_grad: length mismatch");
  LossAndGrad out;
  out.loss = 0.5 * l2_distance_sq(student_logits, teacher_logits);
  out.grad.resize(student_logits.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i)
    out.grad[i] = student_logits[i] - teacher_logits[i];
  return out;
}

std::vector<double> logits_from_probs(std::span<const double> probs, double temperature) {
  std::vector<double> v(probs.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    v[i] = temperature * std::log(std::max(probs[i], kProbFloor));
    mean += v[i];
  }
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  return v;
}

LossAndGrad frame_objective(const DistillLossSpec& spec, std::span<const double> student_logits,
                            std::size_t label, std::span<const double> soft_target) {
  switch (spec.mode) {
    case Regime::kHard:
      return hard_ce_loss_and_grad(student_logits, label);
    case Regime::kSoftOnly:
      return soft_ce_loss_and_grad(student_logits, soft_target, spec.temperature,
                                   spec.scale_soft_by_t2);
    case Regime::kRegularized: {
      const auto hard = one_hot(label, student_logits.size());
      return combined_loss_and_grad(student_logits, hard, soft_target, spec);
    }
    case Regime::kLogitMatch: {
      const auto teacher = logits_from_probs(soft_target, spec.temperature);
      return logit_matching_loss_and_grad(student_logits, teacher);
    }
    case Regime::kPretrain:
      break;
  }
  throw InvalidArgument("frame_objective: pretrain must be split into its phases first");
}

}  // namespace dkt
