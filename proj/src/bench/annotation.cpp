// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/annotation.hpp"

#include <set>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

void AnnotationRecord::validate() const {
  if (image_id.empty()) throw DataError("annotation record has an empty image_id");
  for (const auto& [label, obj] : objects) {
    if (label.empty()) throw DataError("image '" + image_id + "' has an empty object label");
    if (!(obj.confidence >= 0.0 && obj.confidence <= 1.0)) {
      throw DataError("image '" + image_id + "', object '" + label +
                      "': confidence outside [0, 1]");
    }
    if (obj.count < 0) {
      throw DataError("image '" + image_id + "', object '" + label + "': negative count");
    }
  }
}

bool AnnotationRecord::present(const std::string& label) const {
  const auto it = objects.find(label);
  return it != objects.end() && it->second.confidence >= kPresenceThreshold;
}

int AnnotationRecord::counted(const std::string& label) const {
  const auto it = objects.find(label);
  if (it == objects.end() || it->second.confidence < kPresenceThreshold) return 0;
  return it->second.count;
}

Json to_json(const AnnotationRecord& record) {
  Json objects = Json::object();
  for (const auto& [label, obj] : record.objects) {
    objects[label] = {{"confidence", obj.confidence}, {"count", obj.count}};
  }
  return Json{{"image_id", record.image_id}, {"objects", objects}};
}

AnnotationRecord annotation_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("image_id") || !j["image_id"].is_string()) {
    throw DataError("annotation record needs a string 'image_id'");
  }
  AnnotationRecord r;
  r.image_id = j["image_id"].get<std::string>();
  if (j.contains("objects")) {
    if (!j["objects"].is_object()) {
      throw DataError("image '" + r.image_id + "': 'objects' must be an object");
    }
    for (const auto& [label, obj] : j["objects"].items()) {
      if (!obj.is_object() || !obj.contains("confidence") || !obj["confidence"].is_number()) {
        throw DataError("image '" + r.image_id + "', object '" + label +
                        "': needs a numeric 'confidence'");
      }
      ObjectAnnotation a;
      a.confidence = obj["confidence"].get<double>();
      if (obj.contains("count")) {
        if (!obj["count"].is_number_integer()) {
          throw DataError("image '" + r.image_id + "', object '" + label +
                          "': 'count' must be an integer");
        }
        a.count = obj["count"].get<int>();
      }
      if (!r.objects.emplace(label, a).second) {
        throw DataError("image '" + r.image_id + "': duplicate label '" + label + "'");
      }
    }
  }
  r.validate();
  return r;
}

std::vector<AnnotationRecord> parse_annotations(std::string_view jsonl, std::string_view source) {
  std::vector<AnnotationRecord> out;
  std::set<std::string> seen;
  for (const auto& j : parse_jsonl(jsonl, source)) {
    auto r = annotation_from_json(j);
    if (!seen.insert(r.image_id).second) {
      throw DataError(std::string(source) + ": duplicate image_id '" + r.image_id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path), path.string());
}

std::string dump_annotations(std::span<const AnnotationRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace dab::bench
