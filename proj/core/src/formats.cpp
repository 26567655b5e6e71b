// SPDX-License-Identifier: Apache-2.0
#include "dkt/formats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dkt/binary_io.hpp"
#include "dkt/error.hpp"
#include "dkt/numeric.hpp"

namespace dkt {

namespace {

constexpr std::string_view kDatasetMagic = "DKDS1";
constexpr std::string_view kSoftMagic = "DKST1";
constexpr std::string_view kModelMagic = "DKDM1";
constexpr std::uint8_t kArchFeedForward = 1;
constexpr std::uint8_t kArchLstm = 2;

// Guards implausible header sizes before any allocation.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 36;

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

void check_size(std::uint64_t elements, std::uint64_t width, std::uint64_t at, const ByteReader& r,
                const char* what) {
  if (elements > kMaxElements || elements * width > r.remaining())
    throw FormatError(std::string("truncated or oversized ") + what + " section", at);
}

}  // namespace

std::vector<std::uint8_t> encode_dataset(const FrameDataset& dataset) {
  dataset.validate();
  ByteWriter w;
  w.text(kDatasetMagic);
  w.u8(kFormatVersion);
  w.u32(to_u32(dataset.num_classes, "class count"));
  w.u32(to_u32(dataset.feature_dim(), "feature dim"));
  w.u64(dataset.utterances.size());
  w.u64(dataset.frame_count());
  for (const auto& utt : dataset.utterances) {
    w.u32(to_u32(utt.id.size(), "utterance id length"));
    w.text(utt.id);
    w.u64(utt.offset);
    w.u64(utt.count);
  }
  for (double v : dataset.features.values()) w.f32(static_cast<float>(v));
  for (std::uint32_t label : dataset.labels) w.u32(label);
  return w.release();
}

FrameDataset decode_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_header(kDatasetMagic, kFormatVersion);
  FrameDataset ds;
  const std::uint64_t k_at = r.offset();
  ds.num_classes = r.u32();
  if (ds.num_classes < 2) throw FormatError("class count must be at least 2", k_at);
  const std::uint64_t d_at = r.offset();
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw FormatError("feature dim must be positive", d_at);
  const std::uint64_t n_utt = r.u64();
  const std::uint64_t frames_at = r.offset();
  const std::uint64_t frames = r.u64();
  check_size(n_utt, 20, frames_at, r, "manifest");

  std::uint64_t expected = 0;
  ds.utterances.reserve(n_utt);
  for (std::uint64_t u = 0; u < n_utt; ++u) {
    const std::uint64_t at = r.offset();
    const std::uint32_t len = r.u32();
    Utterance utt;
    utt.id = r.text(len);
    utt.offset = r.u64();
    utt.count = r.u64();
    if (utt.offset != expected || utt.count == 0 || utt.count > frames - expected)
      throw FormatError("utterance " + std::to_string(u) + " (" + utt.id +
                            ") does not continue the frame partition",
                        at);
    expected += utt.count;
    ds.utterances.push_back(std::move(utt));
  }
  if (expected != frames)
    throw FormatError("manifest covers " + std::to_string(expected) + " of " +
                          std::to_string(frames) + " frames",
                      r.offset());

  const std::uint64_t feat_at = r.offset();
  check_size(frames, std::uint64_t{4} * dim, feat_at, r, "feature");
  ds.features = Matrix(frames, dim);
  for (double& v : ds.features.values()) {
    const std::uint64_t at = r.offset();
    v = r.f32();
    if (!std::isfinite(v)) throw FormatError("non-finite feature value", at);
  }
  check_size(frames, 4, r.offset(), r, "label");
  ds.labels.resize(frames);
  for (std::uint64_t t = 0; t < frames; ++t) {
    const std::uint64_t at = r.offset();
    ds.labels[t] = r.u32();
    if (ds.labels[t] >= ds.num_classes)
      throw FormatError("label " + std::to_string(ds.labels[t]) + " at frame " + std::to_string(t) +
                            " is not below K = " + std::to_string(ds.num_classes),
                        at);
  }
  r.expect_end();
  return ds;
}

void write_dataset(const std::filesystem::path& path, const FrameDataset& dataset) {
  write_file(path, encode_dataset(dataset));
}

FrameDataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

std::string manifest_text(const FrameDataset& dataset) {
  std::ostringstream out;
  for (const auto& utt : dataset.utterances)
    out << utt.id << ' ' << utt.offset << ' ' << utt.count << '\n';
  return out.str();
}

std::vector<std::uint8_t> encode_soft_targets(const SoftTargetSet& targets) {
  if (targets.probs.cols() != targets.class_count)
    throw ShapeError("soft-target matrix width does not match class count");
  ByteWriter w;
  w.text(kSoftMagic);
  w.u8(kFormatVersion);
  w.f64(targets.temperature);
  w.u64(targets.frame_count());
  w.u32(to_u32(targets.class_count, "class count"));
  w.raw(targets.teacher_digest);
  for (double v : targets.probs.values()) w.f32(static_cast<float>(v));
  return w.release();
}

SoftTargetSet decode_soft_targets(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_header(kSoftMagic, kFormatVersion);
  SoftTargetSet set;
  const std::uint64_t t_at = r.offset();
  set.temperature = r.f64();
  if (!(set.temperature > 0.0) || !std::isfinite(set.temperature))
    throw FormatError("temperature must be positive", t_at);
  const std::uint64_t frames = r.u64();
  const std::uint64_t k_at = r.offset();
  set.class_count = r.u32();
  if (set.class_count < 2) throw FormatError("class count must be at least 2", k_at);
  const auto digest = r.raw(set.teacher_digest.size());
  std::copy(digest.begin(), digest.end(), set.teacher_digest.begin());
  check_size(frames, std::uint64_t{4} * set.class_count, r.offset(), r, "soft-target");
  set.probs = Matrix(frames, set.class_count);
  for (std::uint64_t t = 0; t < frames; ++t) {
    const std::uint64_t row_at = r.offset();
    auto row = set.probs.row(t);
    for (double& v : row) v = r.f32();
    if (!is_probability_vector(row, kSoftTargetTolerance))
      throw FormatError("soft-target row " + std::to_string(t) + " is not a probability vector",
                        row_at);
  }
  r.expect_end();
  return set;
}

void write_soft_targets(const std::filesystem::path& path, const SoftTargetSet& targets) {
  write_file(path, encode_soft_targets(targets));
}

SoftTargetSet read_soft_targets(const std::filesystem::path& path) {
  return decode_soft_targets(read_file(path));
}

std::vector<std::uint8_t> encode_model(const ModelParams& model) {
  ByteWriter w;
  w.text(kModelMagic);
  w.u8(kFormatVersion);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FeedForwardParams>) {
          w.u8(kArchFeedForward);
          const auto dims = p.dims();
          w.u32(to_u32(p.layers.size(), "layer count"));
          for (std::size_t d : dims) w.u32(to_u32(d, "layer width"));
        } else {
          w.u8(kArchLstm);
          const LstmShape s = p.shape();
          for (std::size_t v : {s.input_dim, s.layers, s.cells, s.projection, s.classes})
            w.u32(to_u32(v, "LSTM dimension"));
        }
        for (const Matrix* t : tensors(p))
          for (double v : t->values()) w.f64(v);
      },
      model);
  return w.release();
}

ModelParams decode_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_header(kModelMagic, kFormatVersion);
  const std::uint64_t arch_at = r.offset();
  const std::uint8_t arch = r.u8();

  auto read_values = [&r](auto& params) {
    const std::uint64_t at = r.offset();
    check_size(parameter_count(params), 8, at, r, "parameter");
    for (Matrix* t : tensors(params)) {
      for (double& v : t->values()) {
        const std::uint64_t vat = r.offset();
        v = r.f64();
        if (!std::isfinite(v)) throw FormatError("non-finite parameter value", vat);
      }
    }
    r.expect_end();
  };

  if (arch == kArchFeedForward) {
    const std::uint64_t at = r.offset();
    const std::uint32_t layers = r.u32();
    if (layers == 0 || layers > 1024) throw FormatError("implausible layer count", at);
    std::vector<std::size_t> dims(layers + 1);
    std::uint64_t total = 0;
    for (auto& d : dims) {
      const std::uint64_t dat = r.offset();
      d = r.u32();
      if (d == 0) throw FormatError("zero layer width", dat);
    }
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) total += dims[i] * dims[i + 1] + dims[i + 1];
    check_size(total, 8, r.offset(), r, "parameter");
    FeedForwardParams p = make_feedforward(dims);
    read_values(p);
    return p;
  }
  if (arch == kArchLstm) {
    const std::uint64_t at = r.offset();
    LstmShape s;
    s.input_dim = r.u32();
    s.layers = r.u32();
    s.cells = r.u32();
    s.projection = r.u32();
    s.classes = r.u32();
    if (s.input_dim == 0 || s.layers == 0 || s.layers > 1024 || s.cells == 0 ||
        s.projection == 0 || s.projection > s.cells || s.classes == 0)
      throw FormatError("invalid LSTM shape header", at);
    const std::uint64_t c = s.cells, proj = s.projection;
    std::uint64_t total = s.classes * (proj + 1);
    for (std::size_t l = 0; l < s.layers; ++l) {
      const std::uint64_t in = l == 0 ? s.input_dim : proj;
      total += 4 * c * (in + proj + 1) + proj * c;
    }
    check_size(total, 8, r.offset(), r, "parameter");
    LstmProjParams p = make_lstm(s);
    read_values(p);
    return p;
  }
  throw FormatError("unknown architecture tag " + std::to_string(arch), arch_at);
}

void write_model(const std::filesystem::path& path, const ModelParams& model) {
  write_file(path, encode_model(model));
}

ModelParams read_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

Sha256Digest model_digest(const ModelParams& model) { return sha256(encode_model(model)); }

std::vector<std::string> validate_soft_targets(const SoftTargetSet& targets,
                                               const FrameDataset& dataset) {
  std::vector<std::string> violations;
  if (targets.frame_count() != dataset.frame_count())
    violations.push_back("frame count mismatch: soft targets have " +
                         std::to_string(targets.frame_count()) + " frames, dataset has " +
                         std::to_string(dataset.frame_count()));
  if (targets.class_count != dataset.num_classes)
    violations.push_back("class count mismatch: soft targets have K = " +
                         std::to_string(targets.class_count) + ", dataset has K = " +
                         std::to_string(dataset.num_classes));
  if (targets.probs.cols() != targets.class_count)
    violations.push_back("soft-target rows have " + std::to_string(targets.probs.cols()) +
                         " entries, header says " + std::to_string(targets.class_count));
  for (std::size_t t = 0; t < targets.frame_count(); ++t)
    if (!is_probability_vector(targets.row(t), kSoftTargetTolerance))
      violations.push_back("row " + std::to_string(t) + " is not normalised");
  return violations;
}

}  // namespace dkt
