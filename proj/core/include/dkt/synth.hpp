// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/matrix.hpp"

namespace dkt {

/// Synthetic frame-classification task: class labels follow a Markov chain,
/// each frame emits its class centroid plus Gaussian noise, and frames near
/// a class change blend in the neighbouring class's centroid.
struct SynthTaskSpec {
  std::size_t num_classes = 10;
  std::size_t feature_dim = 20;
  /// K x D. Empty means draw centroids from N(0, centroid_scale^2).
  Matrix centroids;
  double centroid_scale = 1.0;
  /// Per-class noise standard deviation. Empty means `noise_scale` for all.
  std::vector<double> class_noise;
  double noise_scale = 1.0;
  /// K x K row-stochastic. Empty means `self_loop` on the diagonal and the
  /// remainder spread evenly.
  Matrix transitions;
  double self_loop = 0.85;
  /// Frames on each side of a class change that get blended.
  std::size_t blend_frames = 2;
  std::size_t min_length = 30;
  std::size_t max_length = 80;
  std::size_t train_utterances = 600;
  std::size_t cv_utterances = 200;
  std::size_t test_utterances = 200;

  /// Throws InvalidArgument for degenerate settings.
  void validate() const;
  Matrix transition_matrix() const;
};

/// Weight given to the neighbouring class centroid for a frame `distance`
/// frames from a class change (1 = adjacent). Zero beyond `blend_frames`.
double blend_weight(std::size_t distance, std::size_t blend_frames) noexcept;

/// Deterministic in (spec, seed). Features are rounded to float precision so
/// a dataset survives its on-disk form bit-exactly.
SplitSet generate_synth(const SynthTaskSpec& spec, std::uint64_t seed);

}  // namespace dkt
