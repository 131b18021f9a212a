// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace dab::bench {

AnnotationIndex::AnnotationIndex(std::span<const AnnotationRecord> records) : records_(records) {
  std::set<std::string> labels;
  for (const auto& r : records) {
    for (const auto& [label, obj] : r.objects) labels.insert(label);
  }
  vocab_.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < vocab_.size(); ++i) label_ids_.emplace(vocab_[i], i);

  const std::size_t v = vocab_.size();
  present_.assign(records.size() * v, 0);
  with_.assign(v, {});
  cooc_.assign(v * v, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<std::size_t> here;
    for (const auto& [label, obj] : records[i].objects) {
      if (obj.confidence >= kPresenceThreshold) here.push_back(label_ids_.at(label));
    }
    for (auto a : here) {
      present_[i * v + a] = 1;
      with_[a].push_back(i);
      for (auto b : here) ++cooc_[a * v + b];
    }
  }
}

std::optional<std::size_t> AnnotationIndex::label_index(const std::string& label) const {
  const auto it = label_ids_.find(label);
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> AnnotationIndex::present_labels(std::size_t image) const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < vocab_.size(); ++l) {
    if (present(image, l)) out.push_back(l);
  }
  return out;
}

std::string instance_id(std::string_view prefix, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return std::string(prefix) + "-" + buf;
}

}  // namespace dab::bench
