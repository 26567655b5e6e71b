// SPDX-License-Identifier: Apache-2.0
#include "dkt/batching.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dkt/error.hpp"
#include "dkt/random.hpp"

namespace dkt {

std::size_t StreamWindow::real_frames() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

StreamBatcher::StreamBatcher(const FrameDataset& dataset, const SoftTargetSet* soft,
                             std::size_t streams, std::size_t window, std::uint64_t shuffle_seed)
    : dataset_(dataset), soft_(soft), window_(window), slots_(streams) {
  if (streams == 0 || window == 0) throw InvalidArgument("StreamBatcher: streams and window must be positive");
  if (soft_ != nullptr) {
    if (soft_->class_count != dataset.num_classes)
      throw AlignmentError("soft targets have K = " + std::to_string(soft_->class_count) +
                           ", dataset has K = " + std::to_string(dataset.num_classes));
    for (const auto& utt : dataset.utterances)
      if (utt.offset + utt.count > soft_->frame_count())
        throw AlignmentError("soft targets end at frame " + std::to_string(soft_->frame_count()) +
                             " before the end of utterance " + utt.id);
    if (soft_->frame_count() != dataset.frame_count())
      throw AlignmentError("soft targets have " + std::to_string(soft_->frame_count()) +
                           " frames, dataset has " + std::to_string(dataset.frame_count()));
  }
  order_.resize(dataset.utterances.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  Rng rng(shuffle_seed);
  rng.shuffle(std::span(order_));
}

bool StreamBatcher::assign(Slot& slot) {
  if (next_utterance_ >= order_.size()) {
    slot.active = false;
    return false;
  }
  slot.active = true;
  slot.utterance = order_[next_utterance_++];
  slot.cursor = 0;
  return true;
}

std::optional<StreamBatch> StreamBatcher::next_batch() {
  StreamBatch batch;
  batch.streams.resize(slots_.size());
  bool any = false;
  const std::size_t dim = dataset_.feature_dim();
  const std::size_t k = dataset_.num_classes;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    Slot& slot = slots_[s];
    StreamWindow& win = batch.streams[s];
    const bool exhausted =
        !slot.active || slot.cursor >= dataset_.utterances[slot.utterance].count;
    if (exhausted) {
      if (!assign(slot)) continue;
      win.reset = true;
    }
    any = true;
    const Utterance& utt = dataset_.utterances[slot.utterance];
    const std::size_t n = std::min(window_, utt.count - slot.cursor);
    win.active = true;
    win.utterance = slot.utterance;
    win.first_frame = utt.offset + slot.cursor;
    win.features = Matrix(window_, dim);
    win.labels.assign(window_, 0);
    win.mask.assign(window_, 0);
    if (soft_ != nullptr) win.soft_targets = Matrix(window_, k);
    for (std::size_t f = 0; f < n; ++f) {
      const std::size_t row = win.first_frame + f;
      const auto src = dataset_.features.row(row);
      std::copy(src.begin(), src.end(), win.features.row(f).begin());
      win.labels[f] = dataset_.labels[row];
      win.mask[f] = 1;
      if (soft_ != nullptr) {
        const auto p = soft_->row(row);
        std::copy(p.begin(), p.end(), win.soft_targets.row(f).begin());
      }
    }
    slot.cursor += n;
  }
  if (!any) return std::nullopt;
  return batch;
}

}  // namespace dkt
