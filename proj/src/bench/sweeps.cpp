// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/sweeps.hpp"

#include "dab/bench/existence.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

SweepDatasets sweep_image_count(std::span<const AnnotationRecord> annotations,
                                std::span<const std::size_t> lengths, std::size_t per_length,
                                std::uint64_t seed, Subtype subtype) {
  SweepDatasets out;
  for (auto len : lengths) {
    if (len < 2) throw DataError("image-count sweep: length " + std::to_string(len) + " is below 2");
    ExistenceOptions opts;
    opts.images_per_instance = len;
    opts.placement = NegativePlacement::last;
    opts.id_prefix = "image-count-" + std::to_string(len);
    out[len] = build_existence_set(annotations, subtype, per_length, seed, opts);
  }
  return out;
}

SweepDatasets sweep_negative_position(std::span<const ViewGroup> groups,
                                      const SimilarityMatrix& sim, std::size_t seq_len,
                                      std::size_t per_position, std::uint64_t seed) {
  if (seq_len < 2) throw DataError("negative-position sweep needs sequences of at least 2 images");
  SweepDatasets out;
  for (std::size_t p = 1; p <= seq_len; ++p) {
    IdentityOptions opts;
    opts.images_per_instance = seq_len;
    opts.fixed_position = p;
    opts.id_prefix = "negative-position-" + std::to_string(p);
    out[p] = build_identity_set(groups, sim, per_position, seed, opts);
  }
  return out;
}

SweepDatasets sweep_negative_ratio(std::span<const ViewGroup> groups, const SimilarityMatrix& sim,
                                   std::span<const std::size_t> positives_per_instance,
                                   std::size_t per_config, std::uint64_t seed) {
  SweepDatasets out;
  for (auto m : positives_per_instance) {
    if (m == 0) {
      throw DataError("negative-ratio sweep: m = 0 leaves a single-image instance");
    }
    IdentityOptions opts;
    opts.images_per_instance = m + 1;
    opts.fixed_position = 1;
    opts.id_prefix = "negative-ratio-" + std::to_string(m);
    out[m] = build_identity_set(groups, sim, per_config, seed, opts);
  }
  return out;
}

}  // namespace dab::bench
