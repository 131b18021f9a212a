// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dab/bench/annotation.hpp"
#include "dab/bench/qa_instance.hpp"
#include "dab/util/rng.hpp"

namespace dab::bench {

/// Presence, frequency and co-occurrence statistics over an annotation
/// pool. Labels are indexed in sorted order, so "lowest index" doubles as
/// the lexicographic tie-break.
class AnnotationIndex {
 public:
  explicit AnnotationIndex(std::span<const AnnotationRecord> records);

  std::size_t image_count() const noexcept { return records_.size(); }
  const AnnotationRecord& image(std::size_t i) const { return records_[i]; }
  const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
  std::optional<std::size_t> label_index(const std::string& label) const;

  bool present(std::size_t image, std::size_t label) const {
    return present_[image * vocab_.size() + label] != 0;
  }
  /// Images in which the label is present, ascending.
  const std::vector<std::size_t>& images_with(std::size_t label) const { return with_[label]; }
  std::size_t frequency(std::size_t label) const { return with_[label].size(); }
  /// Number of images in which both labels are present.
  std::size_t cooccurrence(std::size_t a, std::size_t b) const {
    return cooc_[a * vocab_.size() + b];
  }
  std::vector<std::size_t> present_labels(std::size_t image) const;

 private:
  std::span<const AnnotationRecord> records_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> label_ids_;
  std::vector<char> present_;
  std::vector<std::vector<std::size_t>> with_;
  std::vector<std::size_t> cooc_;
};

/// Tracks emitted (object, images) keys so builders can prefer fresh
/// combinations. After `budget` collisions a duplicate is accepted.
class FreshnessGuard {
 public:
  explicit FreshnessGuard(std::size_t budget = 32) : budget_(budget) {}

  /// Calls draw() until it yields a key not seen before, or the budget is
  /// spent. draw returns std::nullopt for an infeasible draw; if every
  /// attempt is infeasible the result is nullopt.
  template <typename Draw>
  auto pick(Draw&& draw) -> decltype(draw()) {
    decltype(draw()) last;
    for (std::size_t attempt = 0; attempt < budget_; ++attempt) {
      auto cand = draw();
      if (!cand) continue;
      last = cand;
      if (!seen_.contains(key_of(*cand))) break;
    }
    if (last) seen_.insert(key_of(*last));
    return last;
  }

 private:
  static std::string key_of(const QAInstance& inst) {
    std::string k = inst.object;
    for (const auto& id : inst.image_ids) {
      k += '\x1f';
      k += id;
    }
    return k;
  }

  std::size_t budget_;
  std::unordered_set<std::string> seen_;
};

/// Positives are total - total / 2, so an even total splits exactly.
inline std::size_t default_positive_count(std::size_t total) { return total - total / 2; }

/// Zero-padded instance id, e.g. "existence-random-000042".
std::string instance_id(std::string_view prefix, std::size_t index);

}  // namespace dab::bench
