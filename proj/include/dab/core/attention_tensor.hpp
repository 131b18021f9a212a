// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dab::core {

/// Absolute tolerance on the sum of every attention row.
inline constexpr double kRowSumTolerance = 1e-9;

struct TensorShape {
  std::size_t layers = 0;
  std::size_t heads = 0;
  std::size_t queries = 0;
  std::size_t keys = 0;

  std::size_t rows() const noexcept { return layers * heads * queries; }
  std::size_t size() const noexcept { return rows() * keys; }
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

/// Dense layer x head x query x key attention weights, row-major.
///
/// Every row is a probability vector: entries in [0, 1] summing to 1
/// within kRowSumTolerance. The constructor enforces this, so any
/// AttentionTensor in hand is valid.
///
/// When queries < keys the query axis covers the trailing query
/// positions of the sequence (the decoding case); query q sits at key
/// position keys - queries + q.
class AttentionTensor {
 public:
  /// Throws DimensionError on a zero dimension or size mismatch and
  /// DomainError on a weight outside [0, 1] or a row that does not sum to 1.
  AttentionTensor(TensorShape shape, std::vector<double> weights);

  const TensorShape& shape() const noexcept { return shape_; }
  std::span<const double> weights() const noexcept { return weights_; }

  std::size_t row_index(std::size_t layer, std::size_t head, std::size_t query) const noexcept {
    return (layer * shape_.heads + head) * shape_.queries + query;
  }
  std::span<const double> row(std::size_t layer, std::size_t head, std::size_t query) const {
    return row(row_index(layer, head, query));
  }
  std::span<const double> row(std::size_t flat_row) const {
    return std::span<const double>(weights_).subspan(flat_row * shape_.keys, shape_.keys);
  }
  double at(std::size_t layer, std::size_t head, std::size_t query, std::size_t key) const {
    return weights_[row_index(layer, head, query) * shape_.keys + key];
  }

  /// Key position of query index q.
  std::size_t query_position(std::size_t query) const noexcept {
    return shape_.keys - shape_.queries + query;
  }

  friend bool operator==(const AttentionTensor&, const AttentionTensor&) = default;

 private:
  TensorShape shape_;
  std::vector<double> weights_;
};

}  // namespace dab::core
