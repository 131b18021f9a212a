// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "dab/core/segment_map.hpp"
#include "dab/util/errors.hpp"
#include "doctest.h"

using dab::core::SegmentMap;
using dab::core::TokenSpan;

TEST_CASE("contiguous layout puts text after the images") {
  const auto m = SegmentMap::contiguous(2, 2, 1);
  CHECK(m.image_count() == 2);
  CHECK(m.image(0) == TokenSpan{0, 2});
  CHECK(m.image(1) == TokenSpan{2, 4});
  CHECK(m.text() == TokenSpan{4, 5});
  CHECK(m.keys() == 5);
}

TEST_CASE("an empty text span is rejected") {
  // Two images of two tokens over four keys leave nothing for text.
  CHECK_THROWS_AS(SegmentMap({{0, 2}, {2, 4}}, {4, 4}), dab::DimensionError);
  CHECK_THROWS_AS(SegmentMap::contiguous(2, 2, 0), dab::DimensionError);
}

TEST_CASE("malformed partitions are rejected") {
  CHECK_THROWS_AS(SegmentMap({}, {0, 3}), dab::DimensionError);
  CHECK_THROWS_AS(SegmentMap({{0, 0}, {0, 2}}, {2, 3}), dab::DimensionError);
  CHECK_THROWS_AS(SegmentMap({{0, 3}, {2, 4}}, {4, 5}), dab::DimensionError);  // overlap
  CHECK_THROWS_AS(SegmentMap({{0, 2}, {3, 4}}, {4, 5}), dab::DimensionError);  // gap
  CHECK_THROWS_AS(SegmentMap({{2, 4}, {0, 2}}, {4, 5}), dab::DimensionError);  // order
  CHECK_THROWS_AS(SegmentMap({{1, 2}}, {2, 3}), dab::DimensionError);          // no key 0
}

TEST_CASE("text may precede the images") {
  const SegmentMap m({{2, 4}, {4, 7}}, {0, 2});
  CHECK(m.keys() == 7);
}

TEST_CASE("single-image maps are legal") {
  const auto m = SegmentMap::contiguous(1, 3, 2);
  CHECK(m.image_count() == 1);
}

TEST_CASE("flat encoding round-trips and rejects bad lists") {
  const SegmentMap m({{0, 3}, {3, 4}, {4, 9}}, {9, 12});
  const auto flat = m.to_flat();
  CHECK(flat == std::vector<std::int64_t>{0, 3, 3, 4, 4, 9, 9, 12});
  CHECK(SegmentMap::from_flat(flat) == m);

  const std::vector<std::int64_t> odd{0, 2, 2};
  const std::vector<std::int64_t> short_list{0, 2};
  const std::vector<std::int64_t> negative{0, 2, -1, 4};
  CHECK_THROWS_AS(SegmentMap::from_flat(odd), dab::DimensionError);
  CHECK_THROWS_AS(SegmentMap::from_flat(short_list), dab::DimensionError);
  CHECK_THROWS_AS(SegmentMap::from_flat(negative), dab::DimensionError);
}
