// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/existence.hpp"

#include <algorithm>

#include "dab/util/errors.hpp"

namespace dab::bench {

namespace {

constexpr std::size_t kAnchorAttempts = 2000;

QAInstance make_instance(const AnnotationIndex& index, std::size_t label,
                         const std::vector<std::size_t>& images, Subtype subtype) {
  QAInstance inst;
  inst.task = TaskKind::existence;
  inst.subtype = subtype;
  inst.object = index.vocabulary()[label];
  inst.question = existence_question(inst.object, images.size());
  for (auto i : images) {
    inst.image_ids.push_back(index.image(i).image_id);
    inst.labels.push_back(index.present(i, label));
  }
  inst.gold = std::all_of(inst.labels.begin(), inst.labels.end(), [](bool b) { return b; });
  return inst;
}

}  // namespace

std::optional<std::size_t> choose_absent_object(const AnnotationIndex& index, std::size_t anchor,
                                                Subtype subtype, std::size_t min_support,
                                                Rng& rng) {
  const auto& vocab = index.vocabulary();
  std::vector<std::size_t> candidates;
  for (std::size_t l = 0; l < vocab.size(); ++l) {
    if (!index.present(anchor, l) && index.frequency(l) >= min_support) candidates.push_back(l);
  }
  if (candidates.empty()) return std::nullopt;

  switch (subtype) {
    case Subtype::random:
      return candidates[rng.uniform_index(candidates.size())];
    case Subtype::popular: {
      // Candidates are in label order, so the first maximum wins ties.
      std::size_t best = candidates.front();
      for (auto l : candidates) {
        if (index.frequency(l) > index.frequency(best)) best = l;
      }
      return best;
    }
    case Subtype::adversarial: {
      const auto here = index.present_labels(anchor);
      std::size_t best = candidates.front();
      std::size_t best_score = 0;
      bool first = true;
      for (auto l : candidates) {
        std::size_t score = 0;
        for (auto p : here) score += index.cooccurrence(l, p);
        if (first || score > best_score) {
          best = l;
          best_score = score;
          first = false;
        }
      }
      return best;
    }
  }
  return std::nullopt;
}

std::vector<QAInstance> build_existence_set(std::span<const AnnotationRecord> annotations,
                                            Subtype subtype, std::size_t per_subtype,
                                            std::uint64_t seed, const ExistenceOptions& options) {
  const std::size_t len = options.images_per_instance;
  if (len < 2) throw DataError("existence instances need at least 2 images");
  const std::size_t positives = options.positives.value_or(default_positive_count(per_subtype));
  if (positives > per_subtype) throw DataError("existence: more positives than instances requested");
  const std::size_t negatives = per_subtype - positives;
  const std::string prefix =
      options.id_prefix.empty() ? "existence-" + std::string(to_string(subtype)) : options.id_prefix;
  const std::string tag = std::string(to_string(subtype)) + "/" + std::to_string(len);

  AnnotationIndex index(annotations);
  if (index.image_count() < len) {
    throw DataError("existence: pool has " + std::to_string(index.image_count()) +
                    " images, need at least " + std::to_string(len));
  }

  std::vector<QAInstance> out;
  out.reserve(per_subtype);
  FreshnessGuard guard;

  if (positives > 0) {
    std::vector<std::size_t> eligible;
    for (std::size_t l = 0; l < index.vocabulary().size(); ++l) {
      if (index.frequency(l) >= len) eligible.push_back(l);
    }
    if (eligible.empty()) {
      throw DataError("existence/" + std::string(to_string(subtype)) +
                      ": no object is present in " + std::to_string(len) +
                      " or more images, cannot build " + std::to_string(positives) +
                      " positives");
    }
    Rng rng(derive_seed(seed, "existence/positive/" + tag));
    for (std::size_t n = 0; n < positives; ++n) {
      auto inst = guard.pick([&]() -> std::optional<QAInstance> {
        const auto label = eligible[rng.uniform_index(eligible.size())];
        const auto& pool = index.images_with(label);
        std::vector<std::size_t> images;
        for (auto j : rng.sample_without_replacement(pool.size(), len)) images.push_back(pool[j]);
        return make_instance(index, label, images, subtype);
      });
      out.push_back(std::move(*inst));
    }
  }

  if (negatives > 0) {
    Rng rng(derive_seed(seed, "existence/negative/" + tag));
    for (std::size_t n = 0; n < negatives; ++n) {
      auto inst = guard.pick([&]() -> std::optional<QAInstance> {
        for (std::size_t attempt = 0; attempt < kAnchorAttempts; ++attempt) {
          const auto anchor = static_cast<std::size_t>(rng.uniform_index(index.image_count()));
          const auto label = choose_absent_object(index, anchor, subtype, len - 1, rng);
          if (!label) continue;
          const auto& pool = index.images_with(*label);
          std::vector<std::size_t> images;
          for (auto j : rng.sample_without_replacement(pool.size(), len - 1)) {
            images.push_back(pool[j]);
          }
          const auto pos = options.placement == NegativePlacement::last
                               ? len - 1
                               : static_cast<std::size_t>(rng.uniform_index(len));
          images.insert(images.begin() + static_cast<std::ptrdiff_t>(pos), anchor);
          return make_instance(index, *label, images, subtype);
        }
        return std::nullopt;
      });
      if (!inst) {
        throw DataError("existence/" + std::string(to_string(subtype)) + ": built " +
                        std::to_string(n) + " of " + std::to_string(negatives) +
                        " negatives; no image has an absent object present in " +
                        std::to_string(len - 1) + " other images");
      }
      out.push_back(std::move(*inst));
    }
  }

  Rng order(derive_seed(seed, "existence/order/" + tag));
  order.shuffle(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = instance_id(prefix, i + 1);
  return out;
}

}  // namespace dab::bench
