// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dab/core/attention_tensor.hpp"
#include "dab/core/segment_map.hpp"

namespace dab::core {

/// What to do when the uniform per-image shift drives a weight below zero.
enum class ClampMode {
  /// Zero the weight and take the shortfall evenly from the other tokens of
  /// the same image, repeating until no weight is negative. Keeps the row
  /// sum, the text weights, and each image's target mass.
  redistribute,
  /// Zero the weight, then rescale the whole row back to its input sum.
  renormalize,
};

/// Which attention mass the per-image ratios are measured on.
enum class RatioScope {
  /// Each text-query row is balanced against its own ratios.
  per_row,
  /// One set of ratios per (layer, head), averaged over its text-query
  /// rows; the resulting per-token shift is applied to all of them.
  aggregated,
};

std::string_view to_string(ClampMode mode);
std::string_view to_string(RatioScope scope);
/// Accepts "clamp-redistribute" / "clamp-renormalize" (the "clamp-" prefix
/// is optional). Throws ConfigError otherwise.
ClampMode parse_clamp_mode(std::string_view text);
/// Accepts "per-row" / "aggregated". Throws ConfigError otherwise.
RatioScope parse_scope(std::string_view text);

struct RebalanceConfig {
  double alpha = 0.5;  // balancing coefficient
  double tau = 0.2;    // a row (or head) is adjusted only if its visual mass exceeds tau
  ClampMode clamp_mode = ClampMode::redistribute;
  RatioScope scope = RatioScope::per_row;

  /// Throws ConfigError unless alpha and tau lie in [0, 1].
  void validate() const;
};

/// Per-image attention mass of one row (or one aggregated head).
struct RatioVector {
  std::vector<double> per_image;
  double total_visual = 0.0;
  double avg_ratio = 0.0;
  std::vector<double> deltas;  // avg_ratio - per_image[k]
};

/// Throws DimensionError if row.size() != segmap.keys() and DomainError on
/// a negative or non-finite weight.
RatioVector segment_ratios(std::span<const double> row, const SegmentMap& segmap);

/// Fills total_visual, avg_ratio and deltas from per_image.
RatioVector ratios_from_masses(std::vector<double> per_image);

/// Strict comparison: a row whose visual mass equals tau is not eligible.
bool head_eligible(const RatioVector& ratios, const RebalanceConfig& config);

struct RowRebalance {
  std::vector<double> weights;
  std::size_t clamp_events = 0;
  bool eligible = false;
};

/// Shifts every token of image k by alpha * delta_k / N_k. Rows that are
/// not eligible come back unchanged.
RowRebalance rebalance_row(std::span<const double> row, const SegmentMap& segmap,
                           const RebalanceConfig& config);

struct RebalanceOutcome {
  AttentionTensor adjusted;
  std::size_t rows_touched = 0;
  std::size_t rows_skipped_ineligible = 0;
  std::size_t clamp_events = 0;
  double max_row_sum_error = 0.0;
};

/// Query indices whose key position falls inside the text span.
std::vector<std::size_t> text_queries(const TensorShape& shape, const SegmentMap& segmap);

/// Applies the row rule to every text-query row of every (layer, head).
/// In aggregated scope rows_touched / rows_skipped_ineligible count heads.
RebalanceOutcome rebalance_tensor(const AttentionTensor& tensor, const SegmentMap& segmap,
                                  const RebalanceConfig& config);

}  // namespace dab::core
