// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/distill.hpp"
#include "dkt/matrix.hpp"

namespace dkt {

/// One stream's contribution to a batch: F frames from a single utterance,
/// zero-padded past its end.
struct StreamWindow {
  bool active = false;  // false once the stream has run out of utterances
  bool reset = false;   // recurrent state must be zeroed before this window
  std::size_t utterance = 0;
  std::size_t first_frame = 0;  // dataset row of frame 0
  Matrix features;             // F x D
  std::vector<std::uint32_t> labels;
  Matrix soft_targets;         // F x K, empty without a soft-target set
  std::vector<std::uint8_t> mask;  // 1 for real frames, 0 for padding

  std::size_t real_frames() const noexcept;
};

struct StreamBatch {
  std::vector<StreamWindow> streams;
};

/// Deals the utterances of a dataset, in a seeded random order, across S
/// parallel streams that each advance F consecutive frames per batch.
class StreamBatcher {
 public:
  /// `soft` may be null. Throws AlignmentError naming the first utterance not
  /// covered by `soft`, or on a class-count mismatch.
  StreamBatcher(const FrameDataset& dataset, const SoftTargetSet* soft, std::size_t streams,
                std::size_t window, std::uint64_t shuffle_seed);

  /// Next batch, or nullopt at the end of the epoch.
  std::optional<StreamBatch> next_batch();

  const std::vector<std::size_t>& order() const noexcept { return order_; }

 private:
  struct Slot {
    bool active = false;
    std::size_t utterance = 0;
    std::size_t cursor = 0;
  };

  bool assign(Slot& slot);

  const FrameDataset& dataset_;
  const SoftTargetSet* soft_;
  std::size_t window_;
  std::vector<std::size_t> order_;
  std::size_t next_utterance_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace dkt
