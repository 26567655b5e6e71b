// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/distill.hpp"
#include "dkt/params.hpp"

namespace dkt {

// All three formats are little-endian and begin with a 5-byte magic string
// followed by a format version byte (currently 1).
//
// Dataset "DKDS1":
//   u32 K, u32 D, u64 utterance count, u64 frame count,
//   per utterance: u32 id length, id bytes, u64 offset, u64 frame count,
//   frame count x D f32 features (row-major), frame count u32 labels.
//
// Soft targets "DKST1":
//   f64 temperature, u64 frame count, u32 K, 32-byte teacher SHA-256,
//   frame count x K f32 probabilities (row-major).
//
// Model checkpoint "DKDM1":
//   u8 architecture (1 = feed-forward, 2 = LSTM-projection),
//   feed-forward: u32 layer count L, (L + 1) u32 widths {in, hidden..., out};
//   LSTM: u32 input dim, u32 layers, u32 cells, u32 projection, u32 classes;
//   then every parameter as f64 in canonical tensor order (see params.hpp).

inline constexpr std::uint8_t kFormatVersion = 1;

std::vector<std::uint8_t> encode_dataset(const FrameDataset& dataset);
FrameDataset decode_dataset(std::span<const std::uint8_t> bytes);
void write_dataset(const std::filesystem::path& path, const FrameDataset& dataset);
FrameDataset read_dataset(const std::filesystem::path& path);

/// Human-readable manifest: one "id offset count" line per utterance.
std::string manifest_text(const FrameDataset& dataset);

std::vector<std::uint8_t> encode_soft_targets(const SoftTargetSet& targets);
/// Rejects rows that are not probability vectors within kSoftTargetTolerance.
SoftTargetSet decode_soft_targets(std::span<const std::uint8_t> bytes);
void write_soft_targets(const std::filesystem::path& path, const SoftTargetSet& targets);
SoftTargetSet read_soft_targets(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_model(const ModelParams& model);
ModelParams decode_model(std::span<const std::uint8_t> bytes);
void write_model(const std::filesystem::path& path, const ModelParams& model);
ModelParams read_model(const std::filesystem::path& path);

/// SHA-256 of the encoded checkpoint; recorded as soft-target provenance.
Sha256Digest model_digest(const ModelParams& model);

/// Checks a soft-target set against the dataset it is meant for. Returns one
/// message per violation; empty means the pair is usable.
std::vector<std::string> validate_soft_targets(const SoftTargetSet& targets,
                                               const FrameDataset& dataset);

}  // namespace dkt
