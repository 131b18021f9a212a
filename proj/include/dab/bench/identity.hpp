// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dab/bench/qa_instance.hpp"
#include "dab/bench/similarity.hpp"
#include "dab/util/rng.hpp"

namespace dab::bench {

/// Several views of one physical object. `category` is the label used in
/// the question ("chair"); it may repeat across groups.
struct ViewGroup {
  std::string object_id;
  std::string category;
  std::vector<std::string> views;

  friend bool operator==(const ViewGroup&, const ViewGroup&) = default;
};

Json to_json(const ViewGroup& group);
ViewGroup view_group_from_json(const Json& j);
std::vector<ViewGroup> parse_view_groups(std::string_view jsonl, std::string_view source = "<memory>");
std::vector<ViewGroup> read_view_groups(const std::filesystem::path& path);
std::string dump_view_groups(std::span<const ViewGroup> groups);

struct IdentityOptions {
  std::size_t images_per_instance = 4;
  /// 1-based distractor position for every negative; random when unset.
  std::optional<std::size_t> fixed_position;
  std::optional<std::size_t> positives;
  std::string id_prefix = "identity";
};

struct Distractor {
  std::size_t group = 0;
  std::string image_id;
  double mean_similarity = 0.0;
};

/// The image least similar (mean score against `target_views`) among the
/// views of groups other than `target`. When categories are given, groups
/// sharing the target's category are skipped. Ties go to the
/// lexicographically smallest image id. Throws DataError if no candidate
/// exists.
Distractor select_distractor(std::span<const ViewGroup> groups, const SimilarityMatrix& sim,
                             std::size_t target, std::span<const std::string> target_views);

/// `count` views spread evenly over the group's sequence from a random
/// offset, in sequence order.
std::vector<std::string> sample_views(const ViewGroup& group, std::size_t count, Rng& rng);

/// Builds same-object questions. Positives show `images_per_instance`
/// views of one object; negatives show one fewer plus a distractor.
std::vector<QAInstance> build_identity_set(std::span<const ViewGroup> groups,
                                           const SimilarityMatrix& sim, std::size_t total,
                                           std::uint64_t seed,
                                           const IdentityOptions& options = {});

}  // namespace dab::bench
