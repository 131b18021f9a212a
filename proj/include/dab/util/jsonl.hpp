// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dab {

using Json = nlohmann::ordered_json;

/// Parses JSON Lines text. Blank lines are skipped; a parse failure is
/// reported as a DataError carrying `source` and the 1-based line number.
std::vector<Json> parse_jsonl(std::string_view text, std::string_view source = "<memory>");
std::vector<Json> read_jsonl(const std::filesystem::path& path);

/// One compact record per line, each terminated by '\n'.
std::string dump_jsonl(const std::vector<Json>& records);

/// Fixed-point rendering used by every report ("71.59").
std::string format_fixed(double value, int decimals);

/// Rounds to `decimals` places for JSON reports.
double round_to(double value, int decimals);

}  // namespace dab
