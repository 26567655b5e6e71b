// SPDX-License-Identifier: Apache-2.0
#include "dkt/dataset.hpp"

#include <algorithm>
#include <string>

#include "dkt/error.hpp"

namespace dkt {

void FrameDataset::validate() const {
  if (num_classes < 2) throw InvalidArgument("dataset needs at least 2 classes");
  if (features.rows() != labels.size())
    throw InvalidArgument("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                          std::to_string(labels.size()) + " labels");
  std::size_t expected = 0;
  for (const auto& utt : utterances) {
    if (utt.offset != expected)
      throw InvalidArgument("utterance " + utt.id + " starts at frame " + std::to_string(utt.offset) +
                            ", expected " + std::to_string(expected));
    if (utt.count == 0) throw InvalidArgument("utterance " + utt.id + " is empty");
    expected += utt.count;
  }
  if (expected != labels.size())
    throw InvalidArgument("utterances cover " + std::to_string(expected) + " of " +
                          std::to_string(labels.size()) + " frames");
  for (std::size_t t = 0; t < labels.size(); ++t)
    if (labels[t] >= num_classes)
      throw InvalidArgument("label " + std::to_string(labels[t]) + " at frame " + std::to_string(t) +
                            " is not below K = " + std::to_string(num_classes));
}

Matrix FrameDataset::utterance_features(const Utterance& utt) const {
  Matrix m(utt.count, feature_dim());
  const auto src = features.values().subspan(utt.offset * feature_dim(), utt.count * feature_dim());
  std::copy(src.begin(), src.end(), m.values().begin());
  return m;
}

}  // namespace dkt
