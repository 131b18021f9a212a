// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "dab/core/rebalance.hpp"
#include "dab/util/errors.hpp"
#include "doctest.h"

using namespace dab::core;

TEST_CASE("segment_ratios on the skewed two-image row") {
  const std::vector<double> row{0.10, 0.10, 0.30, 0.30, 0.20};
  const auto r = segment_ratios(row, SegmentMap::contiguous(2, 2, 1));
  REQUIRE(r.per_image.size() == 2);
  CHECK(r.per_image[0] == doctest::Approx(0.20).epsilon(1e-14));
  CHECK(r.per_image[1] == doctest::Approx(0.60).epsilon(1e-14));
  CHECK(r.total_visual == doctest::Approx(0.80).epsilon(1e-14));
  CHECK(r.avg_ratio == doctest::Approx(0.40).epsilon(1e-14));
  CHECK(r.deltas[0] == doctest::Approx(0.20).epsilon(1e-14));
  CHECK(r.deltas[1] == doctest::Approx(-0.20).epsilon(1e-14));
  CHECK(std::abs(r.deltas[0] + r.deltas[1]) <= 1e-12);
}

TEST_CASE("segment_ratios on a uniform row is symmetric") {
  const std::vector<double> row(5, 0.2);
  const auto r = segment_ratios(row, SegmentMap::contiguous(2, 2, 1));
  CHECK(r.per_image[0] == r.per_image[1]);
  CHECK(r.deltas[0] == 0.0);
  CHECK(r.deltas[1] == 0.0);
}

TEST_CASE("segment_ratios rejects bad rows") {
  const auto m = SegmentMap::contiguous(2, 2, 1);
  CHECK_THROWS_AS(segment_ratios(std::vector<double>{0.25, 0.25, 0.25, 0.25}, m),
                  dab::DimensionError);
  CHECK_THROWS_AS(segment_ratios(std::vector<double>{0.3, -0.1, 0.3, 0.3, 0.2}, m),
                  dab::DomainError);
}

TEST_CASE("head_eligible uses a strict threshold") {
  RebalanceConfig cfg;
  CHECK(head_eligible(ratios_from_masses({0.2, 0.6}), cfg));
  CHECK_FALSE(head_eligible(ratios_from_masses({0.05, 0.10}), cfg));
  RatioVector boundary;
  boundary.total_visual = 0.2;
  CHECK_FALSE(head_eligible(boundary, cfg));
}

TEST_CASE("config validation and parsing") {
  RebalanceConfig cfg;
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.tau == 0.2);
  CHECK(cfg.clamp_mode == ClampMode::redistribute);
  CHECK(cfg.scope == RatioScope::per_row);
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(), dab::ConfigError);
  cfg.alpha = 0.5;
  cfg.tau = -0.1;
  CHECK_THROWS_AS(cfg.validate(), dab::ConfigError);

  CHECK(parse_clamp_mode("clamp-renormalize") == ClampMode::renormalize);
  CHECK(parse_clamp_mode("redistribute") == ClampMode::redistribute);
  CHECK(parse_scope("aggregated") == RatioScope::aggregated);
  CHECK_THROWS_AS(parse_scope("global"), dab::ConfigError);
  CHECK_THROWS_AS(parse_clamp_mode("clip"), dab::ConfigError);
}
