// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/identity.hpp"

#include <algorithm>
#include <set>

#include "dab/bench/sampling.hpp"
#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

Json to_json(const ViewGroup& group) {
  Json j{{"object_id", group.object_id}};
  if (!group.category.empty()) j["category"] = group.category;
  j["views"] = group.views;
  return j;
}

ViewGroup view_group_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("object_id") || !j["object_id"].is_string()) {
    throw DataError("view group needs a string 'object_id'");
  }
  ViewGroup g;
  g.object_id = j["object_id"].get<std::string>();
  if (j.contains("category")) {
    if (!j["category"].is_string()) {
      throw DataError("view group '" + g.object_id + "': 'category' must be a string");
    }
    g.category = j["category"].get<std::string>();
  }
  if (!j.contains("views") || !j["views"].is_array()) {
    throw DataError("view group '" + g.object_id + "' needs a 'views' array");
  }
  for (const auto& v : j["views"]) {
    if (!v.is_string()) throw DataError("view group '" + g.object_id + "': non-string view id");
    g.views.push_back(v.get<std::string>());
  }
  return g;
}

std::vector<ViewGroup> parse_view_groups(std::string_view jsonl, std::string_view source) {
  std::vector<ViewGroup> out;
  std::set<std::string> ids;
  for (const auto& j : parse_jsonl(jsonl, source)) {
    out.push_back(view_group_from_json(j));
    if (!ids.insert(out.back().object_id).second) {
      throw DataError(std::string(source) + ": duplicate object_id '" + out.back().object_id + "'");
    }
  }
  return out;
}

std::vector<ViewGroup> read_view_groups(const std::filesystem::path& path) {
  return parse_view_groups(read_file(path), path.string());
}

std::string dump_view_groups(std::span<const ViewGroup> groups) {
  std::vector<Json> records;
  for (const auto& g : groups) records.push_back(to_json(g));
  return dump_jsonl(records);
}

Distractor select_distractor(std::span<const ViewGroup> groups, const SimilarityMatrix& sim,
                             std::size_t target, std::span<const std::string> target_views) {
  const auto& t = groups[target];
  std::optional<Distractor> best;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g == target) continue;
    if (!t.category.empty() && groups[g].category == t.category) continue;
    for (const auto& candidate : groups[g].views) {
      double total = 0.0;
      for (const auto& v : target_views) total += sim.score(v, candidate);
      const double mean = total / static_cast<double>(target_views.size());
      if (!best || mean < best->mean_similarity ||
          (mean == best->mean_similarity && candidate < best->image_id)) {
        best = Distractor{g, candidate, mean};
      }
    }
  }
  if (!best) {
    throw DataError("identity: no distractor candidate for object '" + t.object_id +
                    "'; every other group shares its category");
  }
  return *best;
}

std::vector<std::string> sample_views(const ViewGroup& group, std::size_t count, Rng& rng) {
  const std::size_t n = group.views.size();
  if (count == 0 || count > n) {
    throw DataError("identity: cannot take " + std::to_string(count) + " views from group '" +
                    group.object_id + "' with " + std::to_string(n));
  }
  const double step = static_cast<double>(n) / static_cast<double>(count);
  const double offset = rng.uniform01() * step;
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto idx = std::min(n - 1, static_cast<std::size_t>(offset + step * static_cast<double>(i)));
    out.push_back(group.views[idx]);
  }
  return out;
}

std::vector<QAInstance> build_identity_set(std::span<const ViewGroup> groups,
                                           const SimilarityMatrix& sim, std::size_t total,
                                           std::uint64_t seed, const IdentityOptions& options) {
  const std::size_t len = options.images_per_instance;
  if (len < 2) throw DataError("identity instances need at least 2 images");
  if (options.fixed_position && (*options.fixed_position < 1 || *options.fixed_position > len)) {
    throw DataError("identity: distractor position " + std::to_string(*options.fixed_position) +
                    " is outside 1.." + std::to_string(len));
  }
  const std::size_t positives = options.positives.value_or(default_positive_count(total));
  if (positives > total) throw DataError("identity: more positives than instances requested");
  const std::size_t negatives = total - positives;
  if (total == 0) return {};
  if (groups.size() < 2) throw DataError("identity: need at least two view groups");

  std::vector<std::string> missing;
  for (const auto& g : groups) {
    if (g.views.size() < len) {
      throw DataError("identity: group '" + g.object_id + "' has " +
                      std::to_string(g.views.size()) + " views, need " + std::to_string(len));
    }
    for (const auto& v : g.views) {
      if (!sim.contains(v)) missing.push_back(v);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw DataError("identity: similarity matrix lacks " + std::to_string(missing.size()) +
                    " view ids: " + list);
  }

  auto label_of = [](const ViewGroup& g) { return g.category.empty() ? g.object_id : g.category; };

  std::vector<QAInstance> out;
  out.reserve(total);
  FreshnessGuard guard;

  Rng pos_rng(derive_seed(seed, "identity/positive/" + std::to_string(len)));
  for (std::size_t n = 0; n < positives; ++n) {
    auto inst = guard.pick([&]() -> std::optional<QAInstance> {
      const auto& g = groups[pos_rng.uniform_index(groups.size())];
      QAInstance q;
      q.task = TaskKind::identity;
      q.object = label_of(g);
      q.question = identity_question(q.object, len);
      q.image_ids = sample_views(g, len, pos_rng);
      q.target_group = g.object_id;
      q.gold = true;
      return q;
    });
    out.push_back(std::move(*inst));
  }

  Rng neg_rng(derive_seed(seed, "identity/negative/" + std::to_string(len)));
  for (std::size_t n = 0; n < negatives; ++n) {
    auto inst = guard.pick([&]() -> std::optional<QAInstance> {
      const auto target = static_cast<std::size_t>(neg_rng.uniform_index(groups.size()));
      const auto& g = groups[target];
      auto views = sample_views(g, len - 1, neg_rng);
      const auto d = select_distractor(groups, sim, target, views);
      // Always draw, so a fixed position leaves the other choices intact.
      const auto drawn = static_cast<std::size_t>(neg_rng.uniform_index(len)) + 1;
      const auto pos = options.fixed_position.value_or(drawn);
      views.insert(views.begin() + static_cast<std::ptrdiff_t>(pos - 1), d.image_id);
      QAInstance q;
      q.task = TaskKind::identity;
      q.object = label_of(g);
      q.question = identity_question(q.object, len);
      q.image_ids = std::move(views);
      q.target_group = g.object_id;
      q.distractor_group = groups[d.group].object_id;
      q.negative_position = pos;
      q.gold = false;
      return q;
    });
    out.push_back(std::move(*inst));
  }

  Rng order(derive_seed(seed, "identity/order/" + std::to_string(len)));
  order.shuffle(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = instance_id(options.id_prefix, i + 1);
  return out;
}

}  // namespace dab::bench
