// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dab/bench/annotation.hpp"
#include "dab/bench/identity.hpp"
#include "dab/bench/qa_instance.hpp"

namespace dab::bench {

using SweepDatasets = std::map<std::size_t, std::vector<QAInstance>>;

inline const std::vector<std::size_t> kDefaultSweepLengths{2, 3, 4, 5, 6};

/// One balanced existence set per sequence length, with the image lacking
/// the object always placed last.
SweepDatasets sweep_image_count(std::span<const AnnotationRecord> annotations,
                                std::span<const std::size_t> lengths, std::size_t per_length,
                                std::uint64_t seed, Subtype subtype = Subtype::random);

/// One identity set per distractor position 1..seq_len. The sets differ
/// only in where the distractor sits; positives are identical.
SweepDatasets sweep_negative_position(std::span<const ViewGroup> groups,
                                      const SimilarityMatrix& sim, std::size_t seq_len,
                                      std::size_t per_position, std::uint64_t seed);

/// Keyed by m: instances of m target views plus one distractor placed
/// first, so one image in m + 1 is the odd one out. m = 0 is rejected.
SweepDatasets sweep_negative_ratio(std::span<const ViewGroup> groups, const SimilarityMatrix& sim,
                                   std::span<const std::size_t> positives_per_instance,
                                   std::size_t per_config, std::uint64_t seed);

}  // namespace dab::bench
