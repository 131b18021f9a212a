// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/labels.hpp"

#include <algorithm>

#include "dab/util/errors.hpp"

namespace dab::bench {

bool label_existence(std::span<const bool> labels) {
  if (labels.empty()) throw DomainError("label_existence needs at least one label");
  return std::all_of(labels.begin(), labels.end(), [](bool b) { return b; });
}

bool label_existence(const std::vector<bool>& labels) {
  if (labels.empty()) throw DomainError("label_existence needs at least one label");
  return std::all_of(labels.begin(), labels.end(), [](bool b) { return b; });
}

bool label_count(int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw DomainError("object counts cannot be negative");
  return n1 == n2;
}

bool rederive_gold(const QAInstance& inst) {
  switch (inst.task) {
    case TaskKind::existence:
      if (inst.labels.size() != inst.image_ids.size()) {
        throw DataError(inst.id + ": existence meta needs one label per image");
      }
      return label_existence(inst.labels);
    case TaskKind::count:
      if (inst.counts.size() != 2) throw DataError(inst.id + ": count meta needs two counts");
      return label_count(inst.counts[0], inst.counts[1]);
    case TaskKind::identity:
      return !inst.negative_position.has_value();
  }
  throw DataError(inst.id + ": unknown task");
}

}  // namespace dab::bench
