// SPDX-License-Identifier: Apache-2.0
#include "dkt/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "dkt/error.hpp"
#include "dkt/random.hpp"

namespace dkt {

Matrix SynthTaskSpec::transition_matrix() const {
  if (!transitions.empty()) return transitions;
  Matrix m(num_classes, num_classes);
  const double off = num_classes > 1 ? (1.0 - self_loop) / static_cast<double>(num_classes - 1) : 0.0;
  for (std::size_t i = 0; i < num_classes; ++i)
    for (std::size_t j = 0; j < num_classes; ++j) m(i, j) = i == j ? self_loop : off;
  return m;
}

void SynthTaskSpec::validate() const {
  if (num_classes < 2) throw InvalidArgument("synthetic task needs K >= 2");
  if (feature_dim < 1) throw InvalidArgument("synthetic task needs D >= 1");
  if (!centroids.empty() && (centroids.rows() != num_classes || centroids.cols() != feature_dim))
    throw InvalidArgument("centroid matrix must be K x D");
  if (!class_noise.empty() && class_noise.size() != num_classes)
    throw InvalidArgument("class_noise must have K entries");
  for (double s : class_noise)
    if (!(s >= 0.0)) throw InvalidArgument("noise scales must be non-negative");
  if (!(noise_scale >= 0.0)) throw InvalidArgument("noise scale must be non-negative");
  if (!(self_loop >= 0.0 && self_loop <= 1.0)) throw InvalidArgument("self-loop probability must lie in [0, 1]");
  const Matrix t = transition_matrix();
  if (t.rows() != num_classes || t.cols() != num_classes)
    throw InvalidArgument("transition matrix must be K x K");
  for (std::size_t i = 0; i < num_classes; ++i) {
    double sum = 0.0;
    for (double v : t.row(i)) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("transition probabilities must lie in [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidArgument("transition row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  if (min_length < 1 || min_length > max_length)
    throw InvalidArgument("utterance length range must satisfy 1 <= min <= max");
  if (train_utterances < 1) throw InvalidArgument("need at least one training utterance");
}

double blend_weight(std::size_t distance, std::size_t blend_frames) noexcept {
  if (distance == 0 || distance > blend_frames) return 0.0;
  return 0.5 * static_cast<double>(blend_frames + 1 - distance) /
         static_cast<double>(blend_frames + 1);
}

namespace {

std::size_t sample_row(const Matrix& transitions, std::size_t from, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = from;
  for (std::size_t j = 0; j < transitions.cols(); ++j) {
    const double p = transitions(from, j);
    if (p <= 0.0) continue;
    cum += p;
    last_positive = j;
    if (u < cum) return j;
  }
  return last_positive;
}

FrameDataset generate_split(const SynthTaskSpec& spec, const Matrix& centroids,
                            const Matrix& transitions, std::size_t utterances,
                            const std::string& prefix, Rng& rng) {
  const std::size_t k = spec.num_classes;
  const std::size_t d = spec.feature_dim;
  FrameDataset ds;
  ds.num_classes = k;

  std::vector<std::vector<std::uint32_t>> label_seqs;
  std::size_t total = 0;
  for (std::size_t u = 0; u < utterances; ++u) {
    const std::size_t len = spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
    std::vector<std::uint32_t> labels(len);
    labels[0] = static_cast<std::uint32_t>(rng.below(k));
    for (std::size_t t = 1; t < len; ++t)
      labels[t] = static_cast<std::uint32_t>(sample_row(transitions, labels[t - 1], rng));
    char id[64];
    std::snprintf(id, sizeof id, "%s-%05zu", prefix.c_str(), u);
    ds.utterances.push_back({id, total, len});
    total += len;
    label_seqs.push_back(std::move(labels));
  }

  ds.features = Matrix(total, d);
  ds.labels.reserve(total);
  for (std::size_t u = 0; u < utterances; ++u) {
    const auto& labels = label_seqs[u];
    const std::size_t len = labels.size();
    for (std::size_t t = 0; t < len; ++t) {
      const std::uint32_t own = labels[t];
      // Nearest class change on either side; ties prefer the earlier one.
      std::size_t best_dist = 0;
      std::uint32_t neighbour = own;
      for (std::size_t b = t + 1; b-- > 1;) {
        if (labels[b] != labels[b - 1]) {
          best_dist = t - b + 1;
          neighbour = labels[b - 1];
          break;
        }
      }
      for (std::size_t b = t + 1; b < len; ++b) {
        if (labels[b] != labels[b - 1]) {
          const std::size_t dist = b - t;
          if (best_dist == 0 || dist < best_dist) {
            best_dist = dist;
            neighbour = labels[b];
          }
          break;
        }
      }
      const double w = blend_weight(best_dist, spec.blend_frames);
      const double sigma = spec.class_noise.empty() ? spec.noise_scale : spec.class_noise[own];
      auto row = ds.features.row(ds.utterances[u].offset + t);
      for (std::size_t j = 0; j < d; ++j) {
        const double mean = (1.0 - w) * centroids(own, j) + w * centroids(neighbour, j);
        const double value = mean + sigma * rng.normal();
        row[j] = static_cast<float>(value);
      }
      ds.labels.push_back(own);
    }
  }
  return ds;
}

}  // namespace

SplitSet generate_synth(const SynthTaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  Matrix centroids = spec.centroids;
  if (centroids.empty()) {
    Rng rng(derive_seed(seed, 0));
    centroids = Matrix(spec.num_classes, spec.feature_dim);
    for (double& c : centroids.values()) c = static_cast<float>(spec.centroid_scale * rng.normal());
  }
  const Matrix transitions = spec.transition_matrix();
  SplitSet splits;
  Rng train_rng(derive_seed(seed, 1));
  Rng cv_rng(derive_seed(seed, 2));
  Rng test_rng(derive_seed(seed, 3));
  splits.train = generate_split(spec, centroids, transitions, spec.train_utterances, "train", train_rng);
  splits.cv = generate_split(spec, centroids, transitions, spec.cv_utterances, "cv", cv_rng);
  splits.test = generate_split(spec, centroids, transitions, spec.test_utterances, "test", test_rng);
  return splits;
}

}  // namespace dkt
