// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <set>

#include "bench_fixtures.hpp"
#include "dab/bench/count.hpp"
#include "dab/bench/labels.hpp"
#include "dab/util/errors.hpp"
#include "doctest.h"

using namespace dab::bench;
using dab::testing::image;
using dab::testing::shared_pool;

namespace {

std::map<CountPairKind, std::size_t> tally(const std::vector<QAInstance>& set) {
  std::map<CountPairKind, std::size_t> t;
  for (const auto& q : set) ++t[classify_count_pair(q.counts.at(0), q.counts.at(1))];
  return t;
}

}  // namespace

TEST_CASE("800 count questions have the fixed composition") {
  const auto set = build_count_set(shared_pool().annotations, 800, 21);
  CHECK(set.size() == 800);
  CHECK(count_yes(set) == 400);
  auto t = tally(set);
  CHECK(t[CountPairKind::both_absent] == 200);
  CHECK(t[CountPairKind::equal_present] == 200);
  CHECK(t[CountPairKind::one_absent] == 200);
  CHECK(t[CountPairKind::unequal_present] == 200);
}

TEST_CASE("composition arithmetic for small and odd totals") {
  const auto c = count_composition(800);
  CHECK(c.both_absent == 200);
  CHECK(c.one_absent == 200);
  const auto d = count_composition(7);
  CHECK(d.both_absent + d.equal_present == 4);
  CHECK(d.one_absent + d.unequal_present == 3);
}

TEST_CASE("gold equals the brute-force count comparison on a small pool") {
  std::vector<AnnotationRecord> pool{
      image("p1", {{"cup", {0.9, 1}}, {"dog", {0.9, 2}}}),
      image("p2", {{"cup", {0.8, 1}}, {"dog", {0.9, 3}}}),
      image("p3", {{"cup", {0.7, 2}}, {"dog", {0.3, 2}}}),
      image("p4", {{"cup", {0.6, 3}}, {"cat", {0.9, 1}}}),
      image("p5", {{"cat", {0.9, 1}}, {"dog", {0.9, 5}}}),
      image("p6", {{"cat", {0.9, 2}}}),
  };
  const auto ids = dab::testing::by_id(pool);
  const auto set = build_count_set(pool, 40, 3);
  CHECK(set.size() == 40);
  CHECK(count_yes(set) == 20);
  for (const auto& q : set) {
    CAPTURE(q.id);
    REQUIRE(q.image_ids.size() == 2);
    CHECK(q.image_ids[0] != q.image_ids[1]);
    int n[2];
    for (int i = 0; i < 2; ++i) {
      const auto& rec = *ids.at(q.image_ids[i]);
      const auto it = rec.objects.find(q.object);
      n[i] = (it != rec.objects.end() && it->second.confidence >= 0.5) ? it->second.count : 0;
      CHECK(n[i] <= 3);
      CHECK(q.counts[i] == n[i]);
    }
    CHECK(q.gold == (n[0] == n[1]));
    CHECK(rederive_gold(q) == q.gold);
    CHECK(q.question == "Are there the same number of " + q.object + " in all 2 images?");
  }
}

TEST_CASE("a pool of identical images cannot supply negatives") {
  std::vector<AnnotationRecord> pool;
  for (int i = 0; i < 6; ++i) {
    // The weak dog detection makes both-absent pairs available.
    pool.push_back(image("s" + std::to_string(i), {{"cup", {0.9, 2}}, {"dog", {0.2, 1}}}));
  }
  try {
    build_count_set(pool, 8, 1);
    FAIL("expected a data error");
  } catch (const dab::DataError& e) {
    CHECK(std::string(e.what()).find("negative") != std::string::npos);
  }
}

TEST_CASE("count sets are deterministic under a seed") {
  const auto& pool = shared_pool();
  CHECK(dump_dataset(build_count_set(pool.annotations, 100, 5)) ==
        dump_dataset(build_count_set(pool.annotations, 100, 5)));
}
