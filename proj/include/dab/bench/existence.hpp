// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dab/bench/annotation.hpp"
#include "dab/bench/qa_instance.hpp"
#include "dab/bench/sampling.hpp"

namespace dab::bench {

/// Where the image lacking the object goes in a negative instance.
enum class NegativePlacement { random, last };

struct ExistenceOptions {
  std::size_t images_per_instance = 3;
  NegativePlacement placement = NegativePlacement::random;
  /// Overrides the default half/half split.
  std::optional<std::size_t> positives;
  /// Prefix for instance ids; defaults to "existence-<subtype>".
  std::string id_prefix;
};

/// Builds existence questions over the pool.
///
/// A positive picks an object uniformly among those present in at least
/// `images_per_instance` images and samples that many of its images.
/// A negative picks an anchor image, chooses an object absent from it by
/// subtype, and fills the remaining slots with images that contain the
/// object, so exactly one image lacks it:
///   random      - uniform over the anchor's absent objects;
///   popular     - the absent object present in the most pool images;
///   adversarial - the absent object co-occurring most often with the
///                 anchor's present objects (summed over them).
/// Ties go to the lexicographically smallest label. Only objects present
/// in enough images to fill the other slots are candidates.
///
/// Throws DataError naming the shortfall when the pool cannot supply the
/// requested instances.
std::vector<QAInstance> build_existence_set(std::span<const AnnotationRecord> annotations,
                                            Subtype subtype, std::size_t per_subtype,
                                            std::uint64_t seed,
                                            const ExistenceOptions& options = {});

/// The object a negative anchored at `anchor` would query, or nullopt if
/// none is feasible. `min_support` is the number of other images that
/// must contain the object.
std::optional<std::size_t> choose_absent_object(const AnnotationIndex& index, std::size_t anchor,
                                                Subtype subtype, std::size_t min_support,
                                                Rng& rng);

}  // namespace dab::bench
