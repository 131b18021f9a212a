// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "dab/core/rebalance.hpp"
#include "dab/util/errors.hpp"
#include "doctest.h"
#include "random_tensor.hpp"

using namespace dab::core;

namespace {

// One layer, one head, five positions; only the last (text) query is a
// candidate row.
AttentionTensor worked_tensor() {
  std::vector<double> w;
  for (int q = 0; q < 4; ++q) {
    for (int k = 0; k < 5; ++k) w.push_back(k == q ? 1.0 : 0.0);
  }
  for (double x : {0.10, 0.10, 0.30, 0.30, 0.20}) w.push_back(x);
  return AttentionTensor({1, 1, 5, 5}, std::move(w));
}

}  // namespace

TEST_CASE("AttentionTensor validates its invariants") {
  CHECK_THROWS_AS(AttentionTensor({0, 1, 1, 1}, {}), dab::DimensionError);
  CHECK_THROWS_AS(AttentionTensor({1, 1, 1, 2}, {1.0}), dab::DimensionError);
  CHECK_THROWS_AS(AttentionTensor({1, 1, 1, 2}, {0.6, 0.6}), dab::DomainError);
  CHECK_THROWS_AS(AttentionTensor({1, 1, 1, 2}, {1.5, -0.5}), dab::DomainError);
  CHECK_THROWS_AS(AttentionTensor({1, 1, 3, 2}, std::vector<double>(6, 0.5)),
                  dab::DimensionError);
  CHECK_NOTHROW(AttentionTensor({1, 1, 1, 2}, {0.25, 0.75}));
}

TEST_CASE("a single text row matches rebalance_row") {
  const auto t = worked_tensor();
  const auto m = SegmentMap::contiguous(2, 2, 1);
  const auto out = rebalance_tensor(t, m, RebalanceConfig{});
  CHECK(out.rows_touched == 1);
  CHECK(out.rows_skipped_ineligible == 0);
  const auto row = rebalance_row(t.row(0, 0, 4), m, RebalanceConfig{}).weights;
  const auto got = out.adjusted.row(0, 0, 4);
  for (std::size_t i = 0; i < 5; ++i) CHECK(got[i] == row[i]);
  // Image-query rows are not candidates.
  for (std::size_t q = 0; q < 4; ++q) {
    for (std::size_t k = 0; k < 5; ++k) CHECK(out.adjusted.at(0, 0, q, k) == t.at(0, 0, q, k));
  }
  CHECK(out.max_row_sum_error <= 1e-9);
}

TEST_CASE("alpha 0 returns the tensor bit-identical") {
  dab::Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto c = dab::testing::random_tensor_case(rng);
    RebalanceConfig cfg;
    cfg.alpha = 0.0;
    for (auto scope : {RatioScope::per_row, RatioScope::aggregated}) {
      cfg.scope = scope;
      const auto out = rebalance_tensor(c.tensor, c.segmap, cfg);
      CHECK(out.adjusted == c.tensor);
      CHECK(out.clamp_events == 0);
    }
  }
}

TEST_CASE("low-visual tensors are skipped entirely") {
  // Every text row puts 0.2 or less on the images.
  const auto m = SegmentMap::contiguous(2, 1, 3);  // keys 0,1 images; 2..4 text
  std::vector<double> w;
  const std::size_t L = 2, H = 2;
  for (std::size_t r = 0; r < L * H * 5; ++r) {
    const double vis = (r % 2 == 0) ? 0.2 : 0.1;
    w.insert(w.end(), {vis * 0.25, vis * 0.75, (1 - vis) / 3, (1 - vis) / 3, (1 - vis) / 3});
  }
  const AttentionTensor t({L, H, 5, 5}, w);
  for (auto scope : {RatioScope::per_row, RatioScope::aggregated}) {
    RebalanceConfig cfg;
    cfg.scope = scope;
    const auto out = rebalance_tensor(t, m, cfg);
    CHECK(out.adjusted == t);
    CHECK(out.rows_touched == 0);
    CHECK(out.rows_skipped_ineligible == (scope == RatioScope::per_row ? L * H * 3 : L * H));
  }
}

TEST_CASE("per-row counts cover every candidate row and input is untouched") {
  dab::Rng rng(99);
  for (int i = 0; i < 30; ++i) {
    const auto c = dab::testing::random_tensor_case(rng);
    const auto copy = c.tensor;
    const auto out = rebalance_tensor(c.tensor, c.segmap, RebalanceConfig{});
    const auto& s = c.tensor.shape();
    CHECK(out.rows_touched + out.rows_skipped_ineligible ==
          s.layers * s.heads * c.segmap.text().size());
    CHECK(c.tensor == copy);
    CHECK(out.adjusted.shape() == s);
    CHECK(out.max_row_sum_error <= 1e-9);
  }
}

TEST_CASE("aggregated scope applies one head-level shift to every text row") {
  const auto m = SegmentMap::contiguous(2, 2, 2);  // images [0,2) [2,4), text [4,6)
  std::vector<double> w;
  for (int q = 0; q < 4; ++q) {
    for (int k = 0; k < 6; ++k) w.push_back(k == q ? 1.0 : 0.0);
  }
  // Text rows: image masses (0.2, 0.6) and (0.4, 0.4).
  for (double x : {0.10, 0.10, 0.30, 0.30, 0.10, 0.10}) w.push_back(x);
  for (double x : {0.20, 0.20, 0.20, 0.20, 0.10, 0.10}) w.push_back(x);
  const AttentionTensor t({1, 1, 6, 6}, w);
  RebalanceConfig cfg;
  cfg.scope = RatioScope::aggregated;
  cfg.alpha = 1.0;
  const auto out = rebalance_tensor(t, m, cfg);
  CHECK(out.rows_touched == 1);
  // Head ratios (0.3, 0.5), avg 0.4: shifts +0.05 and -0.05 per token.
  const std::vector<double> row4{0.15, 0.15, 0.25, 0.25, 0.10, 0.10};
  const std::vector<double> row5{0.25, 0.25, 0.15, 0.15, 0.10, 0.10};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::abs(out.adjusted.at(0, 0, 4, k) - row4[k]) <= 1e-12);
    CHECK(std::abs(out.adjusted.at(0, 0, 5, k) - row5[k]) <= 1e-12);
  }
}

TEST_CASE("aggregated scope keeps rows valid when a row cannot absorb its reduction") {
  const auto m = SegmentMap::contiguous(2, 1, 2);  // images {0}, {1}; text {2, 3}
  std::vector<double> w{1, 0, 0, 0, 0, 1, 0, 0};
  for (double x : {0.0, 0.9, 0.05, 0.05}) w.push_back(x);  // heavy on image 2
  for (double x : {0.5, 0.01, 0.24, 0.25}) w.push_back(x);  // heavy on image 1
  const AttentionTensor t({1, 1, 4, 4}, w);
  RebalanceConfig cfg;
  cfg.scope = RatioScope::aggregated;
  cfg.alpha = 1.0;
  const auto out = rebalance_tensor(t, m, cfg);
  CHECK(out.clamp_events > 0);
  CHECK(out.max_row_sum_error <= 1e-9);
  // Text untouched, visual mass kept per row.
  for (std::size_t q : {2u, 3u}) {
    CHECK(out.adjusted.at(0, 0, q, 2) == t.at(0, 0, q, 2));
    CHECK(out.adjusted.at(0, 0, q, 3) == t.at(0, 0, q, 3));
    const double vin = t.at(0, 0, q, 0) + t.at(0, 0, q, 1);
    const double vout = out.adjusted.at(0, 0, q, 0) + out.adjusted.at(0, 0, q, 1);
    CHECK(std::abs(vin - vout) <= 1e-12);
  }
}

TEST_CASE("decoding-style tensors map trailing queries onto text positions") {
  const auto m = SegmentMap::contiguous(2, 2, 1);
  std::vector<double> w{0.10, 0.10, 0.30, 0.30, 0.20};
  const AttentionTensor t({1, 1, 1, 5}, w);
  CHECK(text_queries(t.shape(), m) == std::vector<std::size_t>{0});
  const auto out = rebalance_tensor(t, m, RebalanceConfig{});
  CHECK(out.rows_touched == 1);
  CHECK(std::abs(out.adjusted.at(0, 0, 0, 0) - 0.15) <= 1e-12);
}

TEST_CASE("shape mismatch is a dimension error") {
  const auto t = worked_tensor();
  CHECK_THROWS_AS(rebalance_tensor(t, SegmentMap::contiguous(2, 2, 2), RebalanceConfig{}),
                  dab::DimensionError);
}
