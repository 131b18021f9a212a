// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cmath>
#include <vector>

#include "dab/bench/correlation.hpp"
#include "dab/util/errors.hpp"
#include "doctest.h"

using namespace dab::bench;

namespace {

std::vector<std::array<int, 2>> repeat(std::initializer_list<std::pair<std::array<int, 2>, int>> groups) {
  std::vector<std::array<int, 2>> out;
  for (const auto& [xy, n] : groups) {
    for (int i = 0; i < n; ++i) out.push_back(xy);
  }
  return out;
}

// Sample covariance over the product of standard deviations.
double covariance_oracle(const std::vector<std::array<int, 2>>& xy) {
  const double n = static_cast<double>(xy.size());
  double mx = 0, my = 0;
  for (const auto& p : xy) {
    mx += p[0];
    my += p[1];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& p : xy) {
    sxy += (p[0] - mx) * (p[1] - my);
    sxx += (p[0] - mx) * (p[0] - mx);
    syy += (p[1] - my) * (p[1] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("perfect co-occurrence gives a coefficient of one") {
  const auto xy = repeat({{{1, 1}, 5}, {{0, 0}, 5}});
  const auto r = correlation_from_xy(xy);
  CHECK(r.pearson == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.proportions[1][1] == 0.5);
}

TEST_CASE("phi matches a brute-force covariance computation") {
  const auto xy = repeat({{{1, 1}, 6}, {{0, 0}, 2}, {{1, 0}, 1}, {{0, 1}, 1}});
  const auto r = correlation_from_xy(xy);
  CHECK(std::abs(r.pearson - covariance_oracle(xy)) <= 1e-12);
  CHECK(r.counts[1][1] == 6);
  double sum = 0;
  for (const auto& row : r.proportions) {
    for (double p : row) sum += p;
  }
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("a constant margin leaves the coefficient undefined") {
  const auto xy = repeat({{{1, 1}, 3}, {{1, 0}, 2}});
  const auto r = correlation_from_xy(xy);
  CHECK(r.pearson_undefined);
  CHECK(r.pearson == 0.0);
}

TEST_CASE("X and Y follow the sibling rule") {
  HallucinationPair p{"q", {true, false, false}, {false, true, false}};
  CHECK(variable_x(p) == 1);
  CHECK(variable_y(p) == 1);
  p.multi = {true, false, false};
  CHECK(variable_y(p) == 0);
  p.single = {false, false, false};
  CHECK(variable_x(p) == 0);
  CHECK(variable_y(p) == 1);
  p.single = {true, true};
  p.multi = {true, false};
  CHECK(variable_y(p) == 1);
}

TEST_CASE("empty and ragged inputs are rejected") {
  CHECK_THROWS_AS(correlation_analysis(std::vector<HallucinationPair>{}), dab::DomainError);
  const std::vector<HallucinationPair> ragged{{"q", {true}, {true, false}}};
  CHECK_THROWS_AS(correlation_analysis(ragged), dab::DataError);
  const auto parsed = parse_hallucination_pairs(
      "{\"instance_id\":\"a\",\"single\":[1,0],\"multi\":[true,false]}\n");
  REQUIRE(parsed.size() == 1);
  const auto r = correlation_analysis(parsed);
  CHECK(r.counts[1][0] == 1);
  CHECK(to_json(r).contains("y_rule"));
}
