// SPDX-License-Identifier: Apache-2.0
#include "dab/core/flat_api.hpp"

#include <cmath>
#include <string>

#include "dab/core/rebalance.hpp"
#include "dab/util/errors.hpp"
#include "dab/version.hpp"

namespace dab::core {

FlatRebalanceResult rebalance_buffer(std::span<const double> data,
                                     std::span<const std::int64_t> shape,
                                     std::span<const std::int64_t> spans, double alpha,
                                     double tau, std::string_view clamp_mode,
                                     std::string_view scope) {
  RebalanceConfig config;
  config.alpha = alpha;
  config.tau = tau;
  config.clamp_mode = parse_clamp_mode(clamp_mode);
  config.scope = parse_scope(scope);
  config.validate();

  for (auto d : shape) {
    if (d <= 0) throw DimensionError("buffer shape entries must be positive");
  }
  const auto segmap = SegmentMap::from_flat(spans);

  if (shape.size() == 1) {
    if (data.size() != static_cast<std::size_t>(shape[0])) {
      throw DimensionError("buffer length " + std::to_string(data.size()) +
                           " does not match shape (" + std::to_string(shape[0]) + ")");
    }
    auto row = rebalance_row(data, segmap, config);
    FlatRebalanceResult out;
    out.stats.rows_touched = row.eligible ? 1 : 0;
    out.stats.rows_skipped_ineligible = row.eligible ? 0 : 1;
    out.stats.clamp_events = row.clamp_events;
    double in_sum = 0.0;
    double out_sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      in_sum += data[i];
      out_sum += row.weights[i];
    }
    out.stats.max_row_sum_error = std::abs(out_sum - in_sum);
    out.data = std::move(row.weights);
    return out;
  }

  if (shape.size() != 4) {
    throw DimensionError("buffer shape must have 1 or 4 entries, got " +
                         std::to_string(shape.size()));
  }
  const TensorShape ts{static_cast<std::size_t>(shape[0]), static_cast<std::size_t>(shape[1]),
                       static_cast<std::size_t>(shape[2]), static_cast<std::size_t>(shape[3])};
  if (data.size() != ts.size()) {
    throw DimensionError("buffer length " + std::to_string(data.size()) +
                         " does not match shape product " + std::to_string(ts.size()));
  }
  AttentionTensor tensor(ts, std::vector<double>(data.begin(), data.end()));
  auto outcome = rebalance_tensor(tensor, segmap, config);
  FlatRebalanceResult out;
  out.data.assign(outcome.adjusted.weights().begin(), outcome.adjusted.weights().end());
  out.stats = {outcome.rows_touched, outcome.rows_skipped_ineligible, outcome.clamp_events,
               outcome.max_row_sum_error};
  return out;
}

const char* library_version() { return kVersion; }

}  // namespace dab::core
