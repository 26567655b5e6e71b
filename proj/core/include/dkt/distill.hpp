// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/digest.hpp"
#include "dkt/feedforward.hpp"
#include "dkt/matrix.hpp"

namespace dkt {

/// Teacher posteriors for every frame of a dataset, produced at `temperature`.
/// Rows are stored at float precision, so they are normalised to 1e-6.
struct SoftTargetSet {
  double temperature = 1.0;
  std::size_t class_count = 0;
  Matrix probs;  // frame_count x K
  Sha256Digest teacher_digest{};

  std::size_t frame_count() const noexcept { return probs.rows(); }
  std::span<const double> row(std::size_t frame) const { return probs.row(frame); }
  friend bool operator==(const SoftTargetSet&, const SoftTargetSet&) = default;
};

inline constexpr double kSoftTargetTolerance = 1e-6;

enum class Regime { kHard, kSoftOnly, kRegularized, kPretrain, kLogitMatch };

/// Short names used on the command line and in records: hard, soft, reg,
/// pretrain, logitmatch.
std::string_view regime_name(Regime regime);
std::optional<Regime> parse_regime(std::string_view name);
bool needs_soft_targets(Regime regime);

struct DistillLossSpec {
  Regime mode = Regime::kHard;
  double alpha = 0.5;        // weight on the hard term
  double temperature = 1.0;  // applied to teacher and student in the soft term
  bool scale_soft_by_t2 = false;

  /// Defaults for a regime: T^2 scaling on only for kRegularized.
  static DistillLossSpec for_regime(Regime regime, double temperature = 1.0, double alpha = 0.5);
  /// Throws InvalidArgument on alpha outside [0, 1] or temperature <= 0.
  void validate() const;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// softmax_t of teacher logits; the distillation entry point.
std::vector<double> soften_logits(std::span<const double> teacher_logits, double temperature);

/// Runs the teacher over every frame and softens at `temperature`.
SoftTargetSet export_soft_targets(const FeedForwardParams& teacher, const FrameDataset& dataset,
                                  double temperature, const Sha256Digest& teacher_digest);

/// Cross-entropy to a one-hot label at T = 1.
LossAndGrad hard_ce_loss_and_grad(std::span<const double> student_logits, std::size_t label);

/// q = softmax_t(z, T); loss = CE(p, q); grad = (q - p) / T. With
/// `scale_by_t2` both loss and grad are multiplied by T^2.
LossAndGrad soft_ce_loss_and_grad(std::span<const double> student_logits,
                                  std::span<const double> soft_target, double temperature,
                                  bool scale_by_t2);

/// alpha * hard CE (T = 1) + soft term; gradients add linearly.
LossAndGrad combined_loss_and_grad(std::span<const double> student_logits,
                                   std::span<const double> hard_target,
                                   std::span<const double> soft_target,
                                   const DistillLossSpec& spec);

/// 0.5 * ||z - v||^2 and z - v.
LossAndGrad logit_matching_loss_and_grad(std::span<const double> student_logits,
                                         std::span<const double> teacher_logits);

/// Zero-mean logits consistent with `probs` at `temperature`:
/// T ln p, centred. Used when only stored posteriors are available.
std::vector<double> logits_from_probs(std::span<const double> probs, double temperature);

/// Per-frame objective used by the trainer for a single-objective phase
/// (kHard, kSoftOnly, kRegularized or kLogitMatch; kPretrain is resolved by
/// the trainer into its two phases). `soft_target` may be empty for kHard.
LossAndGrad frame_objective(const DistillLossSpec& spec, std::span<const double> student_logits,
                            std::size_t label, std::span<const double> soft_target);

}  // namespace dkt
