// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/answers.hpp"

#include <cctype>
#include <set>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

std::string_view to_string(Answer answer) {
  switch (answer) {
    case Answer::yes: return "yes";
    case Answer::no: return "no";
    case Answer::unparseable: return "unparseable";
  }
  return "unparseable";
}

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> words_of(std::string_view raw) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : raw) {
    if (is_alpha(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

Answer answer_from_string(std::string_view s) {
  if (s == "yes") return Answer::yes;
  if (s == "no") return Answer::no;
  if (s == "unparseable") return Answer::unparseable;
  throw DataError("unknown parsed answer '" + std::string(s) + "'");
}

}  // namespace

Answer parse_answer(std::string_view raw) {
  // The leading token is the first word anyway once punctuation and
  // whitespace are stripped, so one scan covers both rules.
  for (const auto& w : words_of(raw)) {
    if (w == "yes") return Answer::yes;
    if (w == "no") return Answer::no;
  }
  return Answer::unparseable;
}

PredictionRecord make_prediction(std::string instance_id, std::string raw_text) {
  PredictionRecord p;
  p.instance_id = std::move(instance_id);
  p.raw_text = std::move(raw_text);
  p.parsed = parse_answer(p.raw_text);
  return p;
}

Json to_json(const PredictionRecord& pred) {
  Json j{{"instance_id", pred.instance_id},
         {"raw_text", pred.raw_text},
         {"parsed", to_string(pred.parsed)}};
  if (!pred.image_ratios.empty()) j["image_ratios"] = pred.image_ratios;
  return j;
}

PredictionRecord prediction_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("instance_id") || !j["instance_id"].is_string()) {
    throw DataError("prediction record needs a string 'instance_id'");
  }
  if (!j.contains("raw_text") || !j["raw_text"].is_string()) {
    throw DataError("prediction '" + j["instance_id"].get<std::string>() +
                    "' needs a string 'raw_text'");
  }
  auto p = make_prediction(j["instance_id"].get<std::string>(), j["raw_text"].get<std::string>());
  if (j.contains("parsed")) {
    if (!j["parsed"].is_string() || answer_from_string(j["parsed"].get<std::string>()) != p.parsed) {
      throw DataError("prediction '" + p.instance_id + "': stored 'parsed' disagrees with raw_text");
    }
  }
  if (j.contains("image_ratios")) {
    for (const auto& r : j["image_ratios"]) {
      if (!r.is_number()) throw DataError("prediction '" + p.instance_id + "': bad image_ratios");
      p.image_ratios.push_back(r.get<double>());
    }
  }
  return p;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl, std::string_view source) {
  std::vector<PredictionRecord> out;
  std::set<std::string> seen;
  for (const auto& j : parse_jsonl(jsonl, source)) {
    out.push_back(prediction_from_json(j));
    if (!seen.insert(out.back().instance_id).second) {
      throw DataError(std::string(source) + ": duplicate prediction for '" +
                      out.back().instance_id + "'");
    }
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.string());
}

std::string dump_predictions(std::span<const PredictionRecord> preds, std::string_view manifest) {
  std::vector<Json> records;
  records.reserve(preds.size());
  for (const auto& p : preds) {
    auto j = to_json(p);
    if (!manifest.empty()) j["manifest"] = manifest;
    records.push_back(std::move(j));
  }
  return dump_jsonl(records);
}

}  // namespace dab::bench
