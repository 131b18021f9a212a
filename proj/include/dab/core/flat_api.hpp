// SPDX-License-Identifier: Apache-2.0
#pragma once

// Buffer-level entry point for foreign-function bindings. Everything here
// takes plain contiguous arrays so a binding layer only has to hand over
// pointers and lengths. The input is never modified; the result is always
// a freshly allocated buffer.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace dab::core {

struct FlatRebalanceStats {
  std::size_t rows_touched = 0;
  std::size_t rows_skipped_ineligible = 0;
  std::size_t clamp_events = 0;
  double max_row_sum_error = 0.0;
};

struct FlatRebalanceResult {
  std::vector<double> data;
  FlatRebalanceStats stats;
};

/// `shape` is either {keys} (a single row) or {layers, heads, queries, keys}.
/// `spans` uses the SegmentMap::from_flat encoding. Errors are the usual
/// dab::Error subclasses, so the kind can be mapped onto the caller's
/// exception types unchanged.
FlatRebalanceResult rebalance_buffer(std::span<const double> data,
                                     std::span<const std::int64_t> shape,
                                     std::span<const std::int64_t> spans, double alpha,
                                     double tau, std::string_view clamp_mode,
                                     std::string_view scope);

/// Version string of the library, for bindings to re-export.
const char* library_version();

}  // namespace dab::core
