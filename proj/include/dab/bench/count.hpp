// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dab/bench/annotation.hpp"
#include "dab/bench/qa_instance.hpp"

namespace dab::bench {

/// The four kinds of image pair a count set is assembled from.
enum class CountPairKind {
  both_absent,      // n1 = n2 = 0      (positive)
  equal_present,    // n1 = n2 >= 1     (positive)
  one_absent,       // exactly one is 0 (negative)
  unequal_present,  // n1 != n2, both >= 1 (negative)
};

CountPairKind classify_count_pair(int n1, int n2);

struct CountComposition {
  std::size_t both_absent = 0;
  std::size_t equal_present = 0;
  std::size_t one_absent = 0;
  std::size_t unequal_present = 0;
};

/// Half positives, half negatives; within each half, half of the pairs
/// involve absent objects (both absent for positives, one absent for
/// negatives). For 800 this is 200 of each kind.
CountComposition count_composition(std::size_t total);

/// Builds same-count questions over image pairs. An object is a candidate
/// for an image only when its counted instances (confidence >= 0.5) do
/// not exceed three. Throws DataError when a composition quota cannot be
/// met by the pool.
std::vector<QAInstance> build_count_set(std::span<const AnnotationRecord> annotations,
                                        std::size_t total, std::uint64_t seed);

}  // namespace dab::bench
