// SPDX-License-Identifier: Apache-2.0
#include "dab/core/rebalance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dab/util/errors.hpp"

namespace dab::core {

std::string_view to_string(ClampMode mode) {
  return mode == ClampMode::redistribute ? "clamp-redistribute" : "clamp-renormalize";
}

std::string_view to_string(RatioScope scope) {
  return scope == RatioScope::per_row ? "per-row" : "aggregated";
}

ClampMode parse_clamp_mode(std::string_view text) {
  if (text.starts_with("clamp-")) text.remove_prefix(6);
  if (text == "redistribute") return ClampMode::redistribute;
  if (text == "renormalize") return ClampMode::renormalize;
  throw ConfigError("unknown clamp mode '" + std::string(text) +
                    "' (expected clamp-redistribute or clamp-renormalize)");
}

RatioScope parse_scope(std::string_view text) {
  if (text == "per-row") return RatioScope::per_row;
  if (text == "aggregated") return RatioScope::aggregated;
  throw ConfigError("unknown ratio scope '" + std::string(text) +
                    "' (expected per-row or aggregated)");
}

void RebalanceConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ConfigError("tau must lie in [0, 1], got " + std::to_string(tau));
  }
}

RatioVector ratios_from_masses(std::vector<double> per_image) {
  RatioVector r;
  r.per_image = std::move(per_image);
  for (double m : r.per_image) r.total_visual += m;
  r.avg_ratio = r.total_visual / static_cast<double>(r.per_image.size());
  r.deltas.reserve(r.per_image.size());
  for (double m : r.per_image) r.deltas.push_back(r.avg_ratio - m);
  return r;
}

RatioVector segment_ratios(std::span<const double> row, const SegmentMap& segmap) {
  if (row.size() != segmap.keys()) {
    throw DimensionError("row has " + std::to_string(row.size()) +
                         " keys but the segment map covers " + std::to_string(segmap.keys()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!(row[i] >= 0.0) || !std::isfinite(row[i])) {
      throw DomainError("attention weight at key " + std::to_string(i) +
                        " is negative or not finite");
    }
  }
  std::vector<double> masses;
  masses.reserve(segmap.image_count());
  for (const auto& span : segmap.images()) {
    double m = 0.0;
    for (std::size_t i = span.begin; i < span.end; ++i) m += row[i];
    masses.push_back(m);
  }
  return ratios_from_masses(std::move(masses));
}

bool head_eligible(const RatioVector& ratios, const RebalanceConfig& config) {
  return ratios.total_visual > config.tau;
}

namespace {

// Adds `shift` to every token of `span`, then removes any negative
// overshoot from the remaining tokens of the span. Returns the number of
// clamped tokens; `unabsorbed` receives mass that could not be removed
// because every token reached zero.
std::size_t shift_span_redistribute(std::span<double> out, const TokenSpan& span, double shift,
                                    double& unabsorbed) {
  for (std::size_t i = span.begin; i < span.end; ++i) out[i] += shift;
  if (shift >= 0.0) return 0;

  std::vector<std::size_t> active;
  active.reserve(span.size());
  for (std::size_t i = span.begin; i < span.end; ++i) active.push_back(i);

  std::size_t clamped = 0;
  for (;;) {
    double deficit = 0.0;
    std::vector<std::size_t> still;
    still.reserve(active.size());
    for (auto i : active) {
      if (out[i] < 0.0) {
        deficit -= out[i];
        out[i] = 0.0;
        ++clamped;
      } else {
        still.push_back(i);
      }
    }
    if (deficit == 0.0) break;
    if (still.empty()) {
      unabsorbed += deficit;
      break;
    }
    const double take = deficit / static_cast<double>(still.size());
    for (auto i : still) out[i] -= take;
    active = std::move(still);
  }
  return clamped;
}

// Applies per-image shifts to `out` in place according to the clamp mode.
std::size_t apply_shifts(std::span<double> out, std::span<const double> in,
                         const SegmentMap& segmap, std::span<const double> shifts,
                         ClampMode mode) {
  std::size_t clamped = 0;
  if (mode == ClampMode::redistribute) {
    double unabsorbed = 0.0;
    for (std::size_t k = 0; k < segmap.image_count(); ++k) {
      clamped += shift_span_redistribute(out, segmap.image(k), shifts[k], unabsorbed);
    }
    if (unabsorbed > 0.0) {
      // Only reachable in aggregated scope, where a row's own image mass can
      // be smaller than the head-level reduction. Scale the image tokens so
      // the row keeps its input visual mass; text weights stay untouched.
      double visual_in = 0.0;
      double visual_out = 0.0;
      for (const auto& span : segmap.images()) {
        for (std::size_t i = span.begin; i < span.end; ++i) {
          visual_in += in[i];
          visual_out += out[i];
        }
      }
      if (visual_out > 0.0) {
        const double scale = visual_in / visual_out;
        for (const auto& span : segmap.images()) {
          for (std::size_t i = span.begin; i < span.end; ++i) out[i] *= scale;
        }
      }
    }
    return clamped;
  }

  for (std::size_t k = 0; k < segmap.image_count(); ++k) {
    const auto& span = segmap.image(k);
    for (std::size_t i = span.begin; i < span.end; ++i) {
      out[i] += shifts[k];
      if (out[i] < 0.0) {
        out[i] = 0.0;
        ++clamped;
      }
    }
  }
  if (clamped > 0) {
    double sum_in = 0.0;
    double sum_out = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      sum_in += in[i];
      sum_out += out[i];
    }
    const double scale = sum_in / sum_out;
    for (double& w : out) w *= scale;
  }
  return clamped;
}

std::vector<double> token_shifts(const RatioVector& ratios, const SegmentMap& segmap,
                                 double alpha) {
  std::vector<double> shifts(segmap.image_count());
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    shifts[k] = alpha * ratios.deltas[k] / static_cast<double>(segmap.image(k).size());
  }
  return shifts;
}

double row_sum(std::span<const double> row) {
  double s = 0.0;
  for (double w : row) s += w;
  return s;
}

}  // namespace

RowRebalance rebalance_row(std::span<const double> row, const SegmentMap& segmap,
                           const RebalanceConfig& config) {
  config.validate();
  const RatioVector ratios = segment_ratios(row, segmap);
  const double sum_in = row_sum(row);
  if (std::abs(sum_in - 1.0) > kRowSumTolerance) {
    throw DomainError("row sums to " + std::to_string(sum_in) + ", expected 1");
  }

  RowRebalance result;
  result.weights.assign(row.begin(), row.end());
  result.eligible = head_eligible(ratios, config);
  if (!result.eligible || config.alpha == 0.0) return result;

  const auto shifts = token_shifts(ratios, segmap, config.alpha);
  result.clamp_events = apply_shifts(result.weights, row, segmap, shifts, config.clamp_mode);
  return result;
}

std::vector<std::size_t> text_queries(const TensorShape& shape, const SegmentMap& segmap) {
  std::vector<std::size_t> out;
  const std::size_t offset = shape.keys - shape.queries;
  for (std::size_t q = 0; q < shape.queries; ++q) {
    if (segmap.text().contains(offset + q)) out.push_back(q);
  }
  return out;
}

RebalanceOutcome rebalance_tensor(const AttentionTensor& tensor, const SegmentMap& segmap,
                                  const RebalanceConfig& config) {
  config.validate();
  const auto& shape = tensor.shape();
  if (shape.keys != segmap.keys()) {
    throw DimensionError("tensor has " + std::to_string(shape.keys) +
                         " keys but the segment map covers " + std::to_string(segmap.keys()));
  }

  const auto queries = text_queries(shape, segmap);
  std::vector<double> weights(tensor.weights().begin(), tensor.weights().end());
  std::size_t touched = 0;
  std::size_t skipped = 0;
  std::size_t clamps = 0;
  double max_err = 0.0;

  auto out_row = [&](std::size_t flat) {
    return std::span<double>(weights).subspan(flat * shape.keys, shape.keys);
  };
  auto check_sum = [&](std::size_t flat) {
    const double err = std::abs(row_sum(out_row(flat)) - row_sum(tensor.row(flat)));
    max_err = std::max(max_err, err);
  };

  for (std::size_t l = 0; l < shape.layers; ++l) {
    for (std::size_t h = 0; h < shape.heads; ++h) {
      if (config.scope == RatioScope::per_row) {
        for (auto q : queries) {
          const auto flat = tensor.row_index(l, h, q);
          const auto ratios = segment_ratios(tensor.row(flat), segmap);
          if (!head_eligible(ratios, config)) {
            ++skipped;
            continue;
          }
          ++touched;
          if (config.alpha == 0.0) continue;
          const auto shifts = token_shifts(ratios, segmap, config.alpha);
          clamps += apply_shifts(out_row(flat), tensor.row(flat), segmap, shifts,
                                 config.clamp_mode);
          check_sum(flat);
        }
        continue;
      }

      if (queries.empty()) continue;
      std::vector<double> masses(segmap.image_count(), 0.0);
      for (auto q : queries) {
        const auto r = segment_ratios(tensor.row(l, h, q), segmap);
        for (std::size_t k = 0; k < masses.size(); ++k) masses[k] += r.per_image[k];
      }
      for (double& m : masses) m /= static_cast<double>(queries.size());
      const auto ratios = ratios_from_masses(std::move(masses));
      if (!head_eligible(ratios, config)) {
        ++skipped;
        continue;
      }
      ++touched;
      if (config.alpha == 0.0) continue;
      const auto shifts = token_shifts(ratios, segmap, config.alpha);
      for (auto q : queries) {
        const auto flat = tensor.row_index(l, h, q);
        clamps += apply_shifts(out_row(flat), tensor.row(flat), segmap, shifts,
                               config.clamp_mode);
        check_sum(flat);
      }
    }
  }

  if (max_err > kRowSumTolerance) {
    throw InvariantError("rebalanced row sum drifted by " + std::to_string(max_err));
  }
  return RebalanceOutcome{AttentionTensor(shape, std::move(weights)), touched, skipped, clamps,
                          max_err};
}

}  // namespace dab::core
