// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dab/util/jsonl.hpp"

namespace dab::bench {

/// Bumped whenever the serialized field set changes.
inline constexpr int kDatasetSchemaVersion = 1;

enum class TaskKind { existence, count, identity };

/// How an existence negative picks its absent object.
enum class Subtype { random, popular, adversarial };

std::string_view to_string(TaskKind task);
std::string_view to_string(Subtype subtype);
TaskKind parse_task(std::string_view text);
Subtype parse_subtype(std::string_view text);

/// One yes/no question over an ordered list of images.
struct QAInstance {
  std::string id;
  TaskKind task = TaskKind::existence;
  std::vector<std::string> image_ids;
  std::string object;  // queried object label (category for identity)
  std::string question;
  bool gold = false;   // true means "yes"

  std::optional<Subtype> subtype;  // existence only
  std::vector<bool> labels;        // existence: l_i per image
  std::vector<int> counts;         // count: n_i per image
  // identity: 1-based position of the distractor; empty for positives.
  std::optional<std::size_t> negative_position;
  std::string target_group;        // identity: object_id of the repeated object
  std::string distractor_group;    // identity negatives only

  friend bool operator==(const QAInstance&, const QAInstance&) = default;
};

/// "a" or "an" by the label's leading letter (vowel letters take "an").
std::string_view indefinite_article(std::string_view label);
std::string existence_question(std::string_view object, std::size_t images);
std::string count_question(std::string_view object, std::size_t images);
std::string identity_question(std::string_view object, std::size_t images);

/// Canonical serialization: fixed field order, absent meta fields omitted.
Json to_json(const QAInstance& inst);
QAInstance qa_from_json(const Json& j);

std::vector<QAInstance> parse_dataset(std::string_view jsonl, std::string_view source = "<memory>");
std::vector<QAInstance> read_dataset(const std::filesystem::path& path);
/// `manifest` (when non-empty) is appended to every record.
std::string dump_dataset(std::span<const QAInstance> instances, std::string_view manifest = {});

/// Number of yes-labelled instances.
std::size_t count_yes(std::span<const QAInstance> instances);

}  // namespace dab::bench
