// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dab/util/jsonl.hpp"

namespace dab::bench {

/// Detections below this confidence count as absent.
inline constexpr double kPresenceThreshold = 0.5;
/// Count questions only use objects with at most this many instances.
inline constexpr int kMaxCountPerImage = 3;

struct ObjectAnnotation {
  double confidence = 0.0;
  int count = 0;

  friend bool operator==(const ObjectAnnotation&, const ObjectAnnotation&) = default;
};

struct AnnotationRecord {
  std::string image_id;
  std::map<std::string, ObjectAnnotation> objects;

  /// Throws DataError on an empty id, a confidence outside [0, 1] or a
  /// negative count.
  void validate() const;

  bool present(const std::string& label) const;
  /// Instances counted toward a count question: 0 unless the detection
  /// clears the presence threshold.
  int counted(const std::string& label) const;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

Json to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const Json& j);

/// One record per line. Duplicate image ids are rejected.
std::vector<AnnotationRecord> parse_annotations(std::string_view jsonl,
                                                std::string_view source = "<memory>");
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
std::string dump_annotations(std::span<const AnnotationRecord> records);

}  // namespace dab::bench
