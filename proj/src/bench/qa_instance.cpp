// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/qa_instance.hpp"

#include <cctype>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::existence: return "existence";
    case TaskKind::count: return "count";
    case TaskKind::identity: return "identity";
  }
  return "?";
}

std::string_view to_string(Subtype subtype) {
  switch (subtype) {
    case Subtype::random: return "random";
    case Subtype::popular: return "popular";
    case Subtype::adversarial: return "adversarial";
  }
  return "?";
}

TaskKind parse_task(std::string_view text) {
  if (text == "existence") return TaskKind::existence;
  if (text == "count") return TaskKind::count;
  if (text == "identity") return TaskKind::identity;
  throw DataError("unknown task '" + std::string(text) + "'");
}

Subtype parse_subtype(std::string_view text) {
  if (text == "random") return Subtype::random;
  if (text == "popular") return Subtype::popular;
  if (text == "adversarial") return Subtype::adversarial;
  throw DataError("unknown existence subtype '" + std::string(text) + "'");
}

std::string_view indefinite_article(std::string_view label) {
  if (label.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(label.front()))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string existence_question(std::string_view object, std::size_t images) {
  return "Is there " + std::string(indefinite_article(object)) + " " + std::string(object) +
         " in all " + std::to_string(images) + " images?";
}

std::string count_question(std::string_view object, std::size_t images) {
  return "Are there the same number of " + std::string(object) + " in all " +
         std::to_string(images) + " images?";
}

std::string identity_question(std::string_view object, std::size_t images) {
  return "Is there a same " + std::string(object) + " in all " + std::to_string(images) +
         " images?";
}

Json to_json(const QAInstance& inst) {
  Json j;
  j["schema"] = kDatasetSchemaVersion;
  j["id"] = inst.id;
  j["task"] = to_string(inst.task);
  j["images"] = inst.image_ids;
  j["object"] = inst.object;
  j["question"] = inst.question;
  j["gold"] = inst.gold ? "yes" : "no";
  Json meta = Json::object();
  if (inst.subtype) meta["subtype"] = to_string(*inst.subtype);
  if (!inst.labels.empty()) {
    Json labels = Json::array();
    for (bool b : inst.labels) labels.push_back(b ? 1 : 0);
    meta["labels"] = labels;
  }
  if (!inst.counts.empty()) meta["counts"] = inst.counts;
  if (!inst.target_group.empty()) meta["target"] = inst.target_group;
  if (inst.negative_position) meta["negative_position"] = *inst.negative_position;
  if (!inst.distractor_group.empty()) meta["distractor"] = inst.distractor_group;
  j["meta"] = meta;
  return j;
}

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.contains(name)) throw DataError(std::string("dataset record lacks '") + name + "'");
  return j[name];
}

}  // namespace

QAInstance qa_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("dataset record must be a JSON object");
  try {
    if (field(j, "schema").get<int>() != kDatasetSchemaVersion) {
      throw DataError("dataset record has unsupported schema version");
    }
    QAInstance inst;
    inst.id = field(j, "id").get<std::string>();
    inst.task = parse_task(field(j, "task").get<std::string>());
    inst.image_ids = field(j, "images").get<std::vector<std::string>>();
    inst.object = field(j, "object").get<std::string>();
    inst.question = field(j, "question").get<std::string>();
    const auto gold = field(j, "gold").get<std::string>();
    if (gold != "yes" && gold != "no") throw DataError("gold must be \"yes\" or \"no\"");
    inst.gold = gold == "yes";
    if (j.contains("meta")) {
      const auto& meta = j["meta"];
      if (meta.contains("subtype")) inst.subtype = parse_subtype(meta["subtype"].get<std::string>());
      if (meta.contains("labels")) {
        for (const auto& b : meta["labels"]) inst.labels.push_back(b.get<int>() != 0);
      }
      if (meta.contains("counts")) inst.counts = meta["counts"].get<std::vector<int>>();
      if (meta.contains("target")) inst.target_group = meta["target"].get<std::string>();
      if (meta.contains("negative_position")) {
        inst.negative_position = meta["negative_position"].get<std::size_t>();
      }
      if (meta.contains("distractor")) inst.distractor_group = meta["distractor"].get<std::string>();
    }
    return inst;
  } catch (const Json::exception& e) {
    throw DataError(std::string("dataset record has a field of the wrong type: ") + e.what());
  }
}

std::vector<QAInstance> parse_dataset(std::string_view jsonl, std::string_view source) {
  std::vector<QAInstance> out;
  std::size_t n = 0;
  for (const auto& j : parse_jsonl(jsonl, source)) {
    ++n;
    try {
      out.push_back(qa_from_json(j));
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ": record " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<QAInstance> read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

std::string dump_dataset(std::span<const QAInstance> instances, std::string_view manifest) {
  std::string out;
  for (const auto& inst : instances) {
    auto j = to_json(inst);
    if (!manifest.empty()) j["manifest"] = manifest;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t count_yes(std::span<const QAInstance> instances) {
  std::size_t n = 0;
  for (const auto& i : instances) n += i.gold ? 1 : 0;
  return n;
}

}  // namespace dab::bench
