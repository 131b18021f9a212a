// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dab/util/jsonl.hpp"

namespace dab::bench {

enum class Answer { yes, no, unparseable };

std::string_view to_string(Answer answer);

/// Reads a yes/no out of free text. A leading "yes"/"no" wins (case and
/// surrounding punctuation ignored); otherwise the first standalone yes or
/// no word; otherwise unparseable.
Answer parse_answer(std::string_view raw);

struct PredictionRecord {
  std::string instance_id;
  std::string raw_text;
  Answer parsed = Answer::unparseable;
  /// Simulator runs log the mean attention ratio of each image.
  std::vector<double> image_ratios;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

PredictionRecord make_prediction(std::string instance_id, std::string raw_text);

/// {"instance_id", "raw_text"} plus "parsed" and "image_ratios" when
/// written by this library. A stored "parsed" that disagrees with the
/// raw text is a DataError.
Json to_json(const PredictionRecord& pred);
PredictionRecord prediction_from_json(const Json& j);
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl,
                                                std::string_view source = "<memory>");
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
std::string dump_predictions(std::span<const PredictionRecord> preds,
                             std::string_view manifest = {});

}  // namespace dab::bench
