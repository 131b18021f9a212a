// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dab/bench/qa_instance.hpp"
#include "dab/util/jsonl.hpp"

namespace dab::sim {

/// Object counts above this are not representable in a scene.
inline constexpr int kMaxSceneCount = 3;

struct SceneImage {
  /// label -> instance count; 0 records a known but absent object.
  std::map<std::string, int> objects;
  /// Images with equal appearance keys and equal present objects embed to
  /// identical tokens.
  std::uint64_t appearance = 0;

  bool contains(const std::string& label) const;
  friend bool operator==(const SceneImage&, const SceneImage&) = default;
};

struct SyntheticScene {
  std::vector<SceneImage> images;
  std::string queried_object;

  /// Throws ConfigError on fewer than two images or a count outside 0..3.
  void validate() const;
  /// True if some image lists the queried object, even with count 0.
  bool knows_queried_object() const;
  friend bool operator==(const SyntheticScene&, const SyntheticScene&) = default;
};

/// One image per instance image: the queried object with count 1 where
/// the stored label is true and 0 elsewhere; appearance keyed by image id.
/// Throws DataError for anything but an existence instance with labels.
SyntheticScene scene_from_instance(const bench::QAInstance& inst);

Json to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const Json& j);

}  // namespace dab::sim
