// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/distill.hpp"
#include "dkt/random.hpp"

namespace dkt::test {

/// Dataset with the given utterance lengths; features are N(0, 1) and labels
/// cycle through the classes.
inline FrameDataset make_dataset(const std::vector<std::size_t>& lengths, std::size_t dim,
                                 std::size_t classes, std::uint64_t seed = 7) {
  FrameDataset d;
  d.num_classes = classes;
  std::size_t total = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    d.utterances.push_back({"utt-" + std::to_string(i), total, lengths[i]});
    total += lengths[i];
  }
  d.features = Matrix(total, dim);
  Rng rng(seed);
  for (double& v : d.features.values()) v = static_cast<float>(rng.normal());
  for (std::size_t t = 0; t < total; ++t) d.labels.push_back(static_cast<std::uint32_t>(t % classes));
  return d;
}

/// Soft targets that are exact one-hots of the dataset labels.
inline SoftTargetSet one_hot_targets(const FrameDataset& d, double temperature = 1.0) {
  SoftTargetSet s;
  s.temperature = temperature;
  s.class_count = d.num_classes;
  s.probs = Matrix(d.frame_count(), d.num_classes);
  for (std::size_t t = 0; t < d.frame_count(); ++t) s.probs(t, d.labels[t]) = 1.0;
  return s;
}

/// Two well-separated Gaussian classes along the first feature axis; labels
/// switch between utterances so every utterance is single-class.
inline FrameDataset separable_toy(std::size_t utterances, std::size_t length, std::size_t dim,
                                  std::uint64_t seed) {
  FrameDataset d;
  d.num_classes = 2;
  d.features = Matrix(utterances * length, dim);
  Rng rng(seed);
  for (std::size_t u = 0; u < utterances; ++u) {
    d.utterances.push_back({"toy-" + std::to_string(u), u * length, length});
    const std::uint32_t label = static_cast<std::uint32_t>(rng.below(2));
    for (std::size_t f = 0; f < length; ++f) {
      const std::size_t row = u * length + f;
      for (std::size_t j = 0; j < dim; ++j) d.features(row, j) = static_cast<float>(0.3 * rng.normal());
      d.features(row, 0) = static_cast<float>((label == 1 ? 2.0 : -2.0) + 0.3 * rng.normal());
      d.labels.push_back(label);
    }
  }
  return d;
}

}  // namespace dkt::test
