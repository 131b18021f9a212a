// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dab/util/jsonl.hpp"

namespace dab::bench {

/// Per-image hallucination flags for one multi-image question: `single`
/// from asking about each image on its own, `multi` from the joint answer.
struct HallucinationPair {
  std::string instance_id;
  std::vector<bool> single;
  std::vector<bool> multi;
};

/// X = 1 when any single-image answer hallucinated.
/// With X = 1, Y = 1 when the joint answer hallucinated on an image whose
/// own single answer was clean (a sibling). If every image hallucinated
/// alone there is no sibling, and Y falls back to any joint hallucination.
/// With X = 0, Y = 1 when the joint answer hallucinated anywhere.
int variable_x(const HallucinationPair& pair);
int variable_y(const HallucinationPair& pair);

struct CorrelationReport {
  std::size_t total = 0;
  /// counts[x][y]
  std::array<std::array<std::size_t, 2>, 2> counts{};
  std::array<std::array<double, 2>, 2> proportions{};
  /// Phi coefficient, (n11 n00 - n10 n01) / sqrt(n1. n0. n.1 n.0); 0 and
  /// flagged undefined when a margin is empty.
  double pearson = 0.0;
  bool pearson_undefined = false;
  std::size_t sibling_fallbacks = 0;
};

/// Throws DomainError on empty input and DataError when a pair's flag
/// lists differ in length.
CorrelationReport correlation_analysis(std::span<const HallucinationPair> pairs);
/// From already-binned (X, Y) values.
CorrelationReport correlation_from_xy(std::span<const std::array<int, 2>> xy);

Json to_json(const CorrelationReport& report);

/// JSON Lines of {"instance_id", "single": [0/1...], "multi": [0/1...]}.
std::vector<HallucinationPair> parse_hallucination_pairs(std::string_view jsonl,
                                                         std::string_view source = "<memory>");
std::vector<HallucinationPair> read_hallucination_pairs(const std::filesystem::path& path);

}  // namespace dab::bench
