// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/count.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>

#include "dab/bench/sampling.hpp"
#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::bench {

CountPairKind classify_count_pair(int n1, int n2) {
  if (n1 == n2) return n1 == 0 ? CountPairKind::both_absent : CountPairKind::equal_present;
  return (n1 == 0 || n2 == 0) ? CountPairKind::one_absent : CountPairKind::unequal_present;
}

CountComposition count_composition(std::size_t total) {
  const std::size_t positives = default_positive_count(total);
  const std::size_t negatives = total - positives;
  CountComposition c;
  c.both_absent = positives / 2;
  c.equal_present = positives - c.both_absent;
  c.one_absent = negatives / 2;
  c.unequal_present = negatives - c.one_absent;
  return c;
}

namespace {

const char* kind_name(CountPairKind k) {
  switch (k) {
    case CountPairKind::both_absent: return "both-absent positive";
    case CountPairKind::equal_present: return "equal-count positive";
    case CountPairKind::one_absent: return "one-absent negative";
    case CountPairKind::unequal_present: return "unequal-count negative";
  }
  return "?";
}

// Images per counted value 0..3 for one object.
struct Buckets {
  std::array<std::vector<std::size_t>, kMaxCountPerImage + 1> by_count;

  std::size_t present_total() const {
    return by_count[1].size() + by_count[2].size() + by_count[3].size();
  }
  bool supports(CountPairKind kind) const {
    switch (kind) {
      case CountPairKind::both_absent: return by_count[0].size() >= 2;
      case CountPairKind::equal_present:
        return by_count[1].size() >= 2 || by_count[2].size() >= 2 || by_count[3].size() >= 2;
      case CountPairKind::one_absent: return !by_count[0].empty() && present_total() > 0;
      case CountPairKind::unequal_present: {
        int nonempty = 0;
        for (int v = 1; v <= kMaxCountPerImage; ++v) nonempty += by_count[v].empty() ? 0 : 1;
        return nonempty >= 2;
      }
    }
    return false;
  }
};

std::size_t pick(const std::vector<std::size_t>& v, Rng& rng) {
  return v[rng.uniform_index(v.size())];
}

// Draws an ordered image pair of the requested kind.
std::pair<std::size_t, std::size_t> draw_pair(const Buckets& b, CountPairKind kind, Rng& rng) {
  switch (kind) {
    case CountPairKind::both_absent: {
      const auto ij = rng.sample_without_replacement(b.by_count[0].size(), 2);
      return {b.by_count[0][ij[0]], b.by_count[0][ij[1]]};
    }
    case CountPairKind::equal_present: {
      std::vector<int> values;
      for (int v = 1; v <= kMaxCountPerImage; ++v) {
        if (b.by_count[v].size() >= 2) values.push_back(v);
      }
      const auto& pool = b.by_count[values[rng.uniform_index(values.size())]];
      const auto ij = rng.sample_without_replacement(pool.size(), 2);
      return {pool[ij[0]], pool[ij[1]]};
    }
    case CountPairKind::one_absent: {
      std::vector<std::size_t> present;
      for (int v = 1; v <= kMaxCountPerImage; ++v) {
        present.insert(present.end(), b.by_count[v].begin(), b.by_count[v].end());
      }
      const auto absent = pick(b.by_count[0], rng);
      const auto with = pick(present, rng);
      return rng.uniform_index(2) == 0 ? std::pair{absent, with} : std::pair{with, absent};
    }
    case CountPairKind::unequal_present: {
      std::vector<int> values;
      for (int v = 1; v <= kMaxCountPerImage; ++v) {
        if (!b.by_count[v].empty()) values.push_back(v);
      }
      const auto vv = rng.sample_without_replacement(values.size(), 2);
      return {pick(b.by_count[values[vv[0]]], rng), pick(b.by_count[values[vv[1]]], rng)};
    }
  }
  return {0, 0};
}

}  // namespace

std::vector<QAInstance> build_count_set(std::span<const AnnotationRecord> annotations,
                                        std::size_t total, std::uint64_t seed) {
  std::set<std::string> labels;
  for (const auto& r : annotations) {
    for (const auto& [label, obj] : r.objects) labels.insert(label);
  }
  const std::vector<std::string> vocab(labels.begin(), labels.end());

  std::vector<Buckets> buckets(vocab.size());
  for (std::size_t l = 0; l < vocab.size(); ++l) {
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      const int n = annotations[i].counted(vocab[l]);
      if (n <= kMaxCountPerImage) buckets[l].by_count[n].push_back(i);
    }
  }

  const auto comp = count_composition(total);
  const std::array<std::pair<CountPairKind, std::size_t>, 4> quotas{{
      {CountPairKind::both_absent, comp.both_absent},
      {CountPairKind::equal_present, comp.equal_present},
      {CountPairKind::one_absent, comp.one_absent},
      {CountPairKind::unequal_present, comp.unequal_present},
  }};

  std::vector<QAInstance> out;
  out.reserve(total);
  FreshnessGuard guard;
  for (const auto& [kind, quota] : quotas) {
    if (quota == 0) continue;
    std::vector<std::size_t> objects;
    for (std::size_t l = 0; l < vocab.size(); ++l) {
      if (buckets[l].supports(kind)) objects.push_back(l);
    }
    if (objects.empty()) {
      throw DataError(std::string("count: cannot build ") + std::to_string(quota) + " " +
                      kind_name(kind) + " pairs; no object in the pool supports that pairing");
    }
    Rng rng(derive_seed(seed, std::string("count/") + kind_name(kind)));
    for (std::size_t n = 0; n < quota; ++n) {
      auto inst = guard.pick([&]() -> std::optional<QAInstance> {
        const auto l = pick(objects, rng);
        const auto [a, b] = draw_pair(buckets[l], kind, rng);
        QAInstance q;
        q.task = TaskKind::count;
        q.object = vocab[l];
        q.question = count_question(q.object, 2);
        q.image_ids = {annotations[a].image_id, annotations[b].image_id};
        q.counts = {annotations[a].counted(q.object), annotations[b].counted(q.object)};
        q.gold = q.counts[0] == q.counts[1];
        return q;
      });
      out.push_back(std::move(*inst));
    }
  }

  Rng order(derive_seed(seed, "count/order"));
  order.shuffle(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = instance_id("count", i + 1);
  return out;
}

}  // namespace dab::bench
