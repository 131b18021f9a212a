// SPDX-License-Identifier: Apache-2.0
#include "dab/core/attention_tensor.hpp"

#include <cmath>
#include <string>

#include "dab/util/errors.hpp"

namespace dab::core {

AttentionTensor::AttentionTensor(TensorShape shape, std::vector<double> weights)
    : shape_(shape), weights_(std::move(weights)) {
  if (shape_.layers == 0 || shape_.heads == 0 || shape_.queries == 0 || shape_.keys == 0) {
    throw DimensionError("attention tensor dimensions must be positive");
  }
  if (shape_.queries > shape_.keys) {
    throw DimensionError("attention tensor has more queries (" +
                         std::to_string(shape_.queries) + ") than keys (" +
                         std::to_string(shape_.keys) + ")");
  }
  if (weights_.size() != shape_.size()) {
    throw DimensionError("attention tensor expects " + std::to_string(shape_.size()) +
                         " weights, got " + std::to_string(weights_.size()));
  }
  for (std::size_t r = 0; r < shape_.rows(); ++r) {
    double sum = 0.0;
    for (double w : row(r)) {
      if (!(w >= 0.0 && w <= 1.0 + kRowSumTolerance)) {
        throw DomainError("attention weight " + std::to_string(w) + " in row " +
                          std::to_string(r) + " lies outside [0, 1]");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw DomainError("attention row " + std::to_string(r) + " sums to " +
                        std::to_string(sum) + ", not 1");
    }
  }
}

}  // namespace dab::core
