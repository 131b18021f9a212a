// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "dab/core/attention_tensor.hpp"
#include "dab/core/segment_map.hpp"
#include "dab/util/rng.hpp"
#include "rebalance_oracle.hpp"

namespace dab::testing {

struct RandomTensorCase {
  core::AttentionTensor tensor;
  core::SegmentMap segmap;
};

/// Full self-attention tensor (queries == keys) over a random layout.
inline RandomTensorCase random_tensor_case(Rng& rng, std::size_t max_layers = 3,
                                           std::size_t max_heads = 3) {
  const auto layout = random_row_case(rng, 24, 5);
  const auto segmap = core::SegmentMap::contiguous(layout.image_sizes, layout.text_tokens);
  const core::TensorShape shape{1 + rng.uniform_index(max_layers),
                                1 + rng.uniform_index(max_heads), segmap.keys(), segmap.keys()};
  std::vector<double> w;
  w.reserve(shape.size());
  for (std::size_t r = 0; r < shape.rows(); ++r) {
    const double sharp = 1.0 + 3.0 * rng.uniform01();
    std::vector<double> row(shape.keys);
    double s = 0.0;
    for (auto& x : row) {
      x = rng.uniform01() < 0.1 ? 0.0 : std::pow(rng.uniform01(), sharp);
      s += x;
    }
    if (s == 0.0) {
      row[0] = 1.0;
      s = 1.0;
    }
    for (auto x : row) w.push_back(x / s);
  }
  return {core::AttentionTensor(shape, std::move(w)), segmap};
}

}  // namespace dab::testing
