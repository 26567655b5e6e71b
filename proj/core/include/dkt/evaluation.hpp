// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/matrix.hpp"
#include "dkt/params.hpp"

namespace dkt {

/// Logits for every frame of `dataset`. LSTMs run each utterance from a zero
/// state in one pass.
Matrix predict_logits(const FeedForwardParams& model, const FrameDataset& dataset);
Matrix predict_logits(const LstmProjParams& model, const FrameDataset& dataset);
Matrix predict_logits(const ModelParams& model, const FrameDataset& dataset);

/// 100 * (frames whose argmax equals the label) / frames, over frames with a
/// nonzero mask entry (an empty mask means all frames). Throws
/// InvalidArgument when no frame counts.
double frame_accuracy(const Matrix& logits, std::span<const std::uint32_t> labels,
                      std::span<const std::uint8_t> mask = {});
double frame_accuracy(const ModelParams& model, const FrameDataset& dataset);

}  // namespace dkt
