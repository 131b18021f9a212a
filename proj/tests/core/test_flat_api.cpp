// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <string>
#include <vector>

#include "dab/core/flat_api.hpp"
#include "dab/core/rebalance.hpp"
#include "dab/util/errors.hpp"
#include "dab/version.hpp"
#include "doctest.h"
#include "random_tensor.hpp"

using namespace dab::core;

TEST_CASE("row buffer reproduces the worked example") {
  const std::vector<double> row{0.10, 0.10, 0.30, 0.30, 0.20};
  const std::vector<std::int64_t> shape{5};
  const std::vector<std::int64_t> spans{0, 2, 2, 4, 4, 5};
  const auto out = rebalance_buffer(row, shape, spans, 0.5, 0.2, "clamp-redistribute", "per-row");
  const std::vector<double> want{0.15, 0.15, 0.25, 0.25, 0.20};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(out.data[i] - want[i]) <= 1e-12);
  CHECK(out.stats.rows_touched == 1);
  CHECK(row[0] == 0.10);

  const auto same = rebalance_buffer(row, shape, spans, 0.0, 0.2, "clamp-redistribute", "per-row");
  CHECK(same.data == row);
}

TEST_CASE("tensor buffers match rebalance_tensor exactly") {
  dab::Rng rng(500);
  for (int i = 0; i < 50; ++i) {
    const auto c = dab::testing::random_tensor_case(rng);
    const auto& s = c.tensor.shape();
    const std::vector<std::int64_t> shape{static_cast<std::int64_t>(s.layers),
                                          static_cast<std::int64_t>(s.heads),
                                          static_cast<std::int64_t>(s.queries),
                                          static_cast<std::int64_t>(s.keys)};
    RebalanceConfig cfg;
    cfg.alpha = rng.uniform01();
    cfg.scope = i % 2 ? RatioScope::aggregated : RatioScope::per_row;
    const auto out = rebalance_buffer(c.tensor.weights(), shape, c.segmap.to_flat(), cfg.alpha,
                                      cfg.tau, to_string(cfg.clamp_mode), to_string(cfg.scope));
    const auto ref = rebalance_tensor(c.tensor, c.segmap, cfg);
    REQUIRE(out.data.size() == ref.adjusted.weights().size());
    for (std::size_t k = 0; k < out.data.size(); ++k) CHECK(out.data[k] == ref.adjusted.weights()[k]);
    CHECK(out.stats.rows_touched == ref.rows_touched);
  }
}

TEST_CASE("malformed buffers surface the error taxonomy") {
  const std::vector<double> row{0.10, 0.10, 0.30, 0.30, 0.20};
  using S = std::vector<std::int64_t>;
  auto call = [&](const std::vector<double>& d, const S& shape, const S& spans, double a = 0.5,
                  const char* mode = "clamp-redistribute", const char* scope = "per-row") {
    return rebalance_buffer(d, shape, spans, a, 0.2, mode, scope);
  };
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 2, 4, 4}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 3, 4, 4, 5}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 2, 4, 4, 6}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 2, 4, 5, 5}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {6}, {0, 2, 2, 4, 4, 5}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {1, 1, 5}, {0, 2, 2, 4, 4, 5}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {5, 0}, {0, 2, 2, 4, 4, 5}), dab::DimensionError);
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 2, 4, 4, 5}, 1.5), dab::ConfigError);
  CHECK_THROWS_AS(call(row, {5}, {0, 2, 2, 4, 4, 5}, 0.5, "clip"), dab::ConfigError);
  CHECK_THROWS_AS(call({0.1, 0.1, 0.3, 0.3, 0.3}, {5}, {0, 2, 2, 4, 4, 5}), dab::DomainError);
}

TEST_CASE("version string is exported") {
  CHECK(std::string(library_version()) == dab::kVersion);
}
