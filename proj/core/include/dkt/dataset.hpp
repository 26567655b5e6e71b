// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dkt/matrix.hpp"

namespace dkt {

struct Utterance {
  std::string id;
  std::size_t offset = 0;
  std::size_t count = 0;
  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Frame-labelled utterances. `features` has one row per frame; utterance
/// ranges partition the rows in manifest order.
struct FrameDataset {
  std::size_t num_classes = 0;
  std::vector<Utterance> utterances;
  Matrix features;
  std::vector<std::uint32_t> labels;

  std::size_t frame_count() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }

  /// Throws InvalidArgument describing the first broken invariant.
  void validate() const;

  /// Copies the frames of one utterance.
  Matrix utterance_features(const Utterance& utt) const;

  friend bool operator==(const FrameDataset&, const FrameDataset&) = default;
};

struct SplitSet {
  FrameDataset train;
  FrameDataset cv;
  FrameDataset test;
  friend bool operator==(const SplitSet&, const SplitSet&) = default;
};

}  // namespace dkt
