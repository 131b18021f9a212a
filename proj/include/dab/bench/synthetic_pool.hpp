// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dab/bench/annotation.hpp"
#include "dab/bench/identity.hpp"
#include "dab/bench/similarity.hpp"

namespace dab::bench {

/// Stand-in inputs for running the builders without real detector output
/// or view collections. Images are drawn from a handful of scene themes,
/// so some objects are common, some rare, and co-occurrence is uneven.
struct SyntheticPoolConfig {
  std::size_t images = 600;
  std::size_t themes = 8;
  std::size_t view_groups = 48;
  std::size_t min_views = 8;
  std::size_t max_views = 12;
};

struct SyntheticPool {
  std::vector<AnnotationRecord> annotations;
  std::vector<ViewGroup> groups;
  SimilarityMatrix similarity;
};

/// Object labels used by the synthetic pool.
const std::vector<std::string>& synthetic_vocabulary();

SyntheticPool make_synthetic_pool(std::uint64_t seed, const SyntheticPoolConfig& config = {});

}  // namespace dab::bench
