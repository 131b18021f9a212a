// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "dab/bench/qa_instance.hpp"

namespace dab::bench {

/// Conjunction of the per-image labels. Throws DomainError on an empty list.
bool label_existence(std::span<const bool> labels);
bool label_existence(const std::vector<bool>& labels);

/// Yes iff both images hold the same number of the object.
/// Throws DomainError on a negative count.
bool label_count(int n1, int n2);

/// Recomputes the gold answer from an instance's meta fields alone.
/// Throws DataError when the meta needed for the task is missing.
bool rederive_gold(const QAInstance& inst);

}  // namespace dab::bench
