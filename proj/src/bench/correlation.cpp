// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

namespace {

bool any(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) != v.end(); }

bool has_sibling(const HallucinationPair& p) {
  return std::find(p.single.begin(), p.single.end(), false) != p.single.end();
}

void check(const HallucinationPair& p) {
  if (p.single.size() != p.multi.size() || p.single.empty()) {
    throw DataError("hallucination flags for '" + p.instance_id +
                    "' must be non-empty and of equal length");
  }
}

}  // namespace

int variable_x(const HallucinationPair& pair) {
  check(pair);
  return any(pair.single) ? 1 : 0;
}

int variable_y(const HallucinationPair& pair) {
  check(pair);
  if (!any(pair.single) || !has_sibling(pair)) return any(pair.multi) ? 1 : 0;
  for (std::size_t i = 0; i < pair.single.size(); ++i) {
    if (!pair.single[i] && pair.multi[i]) return 1;
  }
  return 0;
}

CorrelationReport correlation_from_xy(std::span<const std::array<int, 2>> xy) {
  if (xy.empty()) throw DomainError("correlation analysis needs at least one instance");
  CorrelationReport r;
  r.total = xy.size();
  for (const auto& [x, y] : xy) {
    if ((x != 0 && x != 1) || (y != 0 && y != 1)) throw DomainError("X and Y must be 0 or 1");
    ++r.counts[x][y];
  }
  const auto n = static_cast<double>(r.total);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) r.proportions[x][y] = static_cast<double>(r.counts[x][y]) / n;
  }
  const double n11 = static_cast<double>(r.counts[1][1]);
  const double n00 = static_cast<double>(r.counts[0][0]);
  const double n10 = static_cast<double>(r.counts[1][0]);
  const double n01 = static_cast<double>(r.counts[0][1]);
  const double den = (n11 + n10) * (n00 + n01) * (n11 + n01) * (n10 + n00);
  if (den == 0.0) {
    r.pearson_undefined = true;
  } else {
    r.pearson = (n11 * n00 - n10 * n01) / std::sqrt(den);
  }
  return r;
}

CorrelationReport correlation_analysis(std::span<const HallucinationPair> pairs) {
  if (pairs.empty()) throw DomainError("correlation analysis needs at least one instance");
  std::vector<std::array<int, 2>> xy;
  std::size_t fallbacks = 0;
  for (const auto& p : pairs) {
    const int x = variable_x(p);
    if (x == 1 && !has_sibling(p)) ++fallbacks;
    xy.push_back({x, variable_y(p)});
  }
  auto r = correlation_from_xy(xy);
  r.sibling_fallbacks = fallbacks;
  return r;
}

Json to_json(const CorrelationReport& r) {
  Json cells = Json::array();
  for (int x = 1; x >= 0; --x) {
    for (int y = 1; y >= 0; --y) {
      cells.push_back({{"x", x},
                       {"y", y},
                       {"count", r.counts[x][y]},
                       {"percent", round_to(100.0 * r.proportions[x][y], 2)}});
    }
  }
  Json j{{"total", r.total}, {"cells", cells}, {"pearson", round_to(r.pearson, 4)}};
  if (r.pearson_undefined) j["pearson_undefined"] = true;
  j["y_rule"] = {
      {"x1", "joint answer hallucinated on an image whose single answer was clean"},
      {"x1_no_sibling", "joint answer hallucinated on any image"},
      {"x0", "joint answer hallucinated on any image"},
  };
  j["sibling_fallbacks"] = r.sibling_fallbacks;
  return j;
}

std::vector<HallucinationPair> parse_hallucination_pairs(std::string_view jsonl,
                                                         std::string_view source) {
  auto flags = [](const Json& j, const char* key, const std::string& id) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw DataError("hallucination record '" + id + "' needs a '" + key + "' array");
    }
    std::vector<bool> out;
    for (const auto& v : j[key]) {
      if (v.is_boolean()) {
        out.push_back(v.get<bool>());
      } else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) {
        out.push_back(v.get<int>() == 1);
      } else {
        throw DataError("hallucination record '" + id + "': flags must be 0/1 or booleans");
      }
    }
    return out;
  };
  std::vector<HallucinationPair> out;
  for (const auto& j : parse_jsonl(jsonl, source)) {
    if (!j.is_object() || !j.contains("instance_id") || !j["instance_id"].is_string()) {
      throw DataError(std::string(source) + ": hallucination record needs 'instance_id'");
    }
    HallucinationPair p;
    p.instance_id = j["instance_id"].get<std::string>();
    p.single = flags(j, "single", p.instance_id);
    p.multi = flags(j, "multi", p.instance_id);
    check(p);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<HallucinationPair> read_hallucination_pairs(const std::filesystem::path& path) {
  return parse_hallucination_pairs(read_file(path), path.string());
}

}  // namespace dab::bench
