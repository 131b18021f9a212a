// SPDX-License-Identifier: Apache-2.0
#include "dab/sim/scene.hpp"

#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::sim {

bool SceneImage::contains(const std::string& label) const {
  const auto it = objects.find(label);
  return it != objects.end() && it->second > 0;
}

void SyntheticScene::validate() const {
  if (images.size() < 2) throw ConfigError("a scene needs at least two images");
  for (const auto& img : images) {
    for (const auto& [label, n] : img.objects) {
      if (n < 0 || n > kMaxSceneCount) {
        throw ConfigError("scene object '" + label + "' has count " + std::to_string(n) +
                          ", expected 0.." + std::to_string(kMaxSceneCount));
      }
    }
  }
}

bool SyntheticScene::knows_queried_object() const {
  if (queried_object.empty()) return false;
  for (const auto& img : images) {
    if (img.objects.contains(queried_object)) return true;
  }
  return false;
}

SyntheticScene scene_from_instance(const bench::QAInstance& inst) {
  if (inst.task != bench::TaskKind::existence) {
    throw DataError("instance '" + inst.id + "' is a " + std::string(bench::to_string(inst.task)) +
                    " question; the simulator answers existence questions only");
  }
  if (inst.labels.size() != inst.image_ids.size()) {
    throw DataError("instance '" + inst.id + "' lacks per-image labels");
  }
  SyntheticScene scene;
  scene.queried_object = inst.object;
  for (std::size_t i = 0; i < inst.image_ids.size(); ++i) {
    SceneImage img;
    img.objects[inst.object] = inst.labels[i] ? 1 : 0;
    img.appearance = fnv1a64(inst.image_ids[i]);
    scene.images.push_back(std::move(img));
  }
  return scene;
}

Json to_json(const SyntheticScene& scene) {
  Json images = Json::array();
  for (const auto& img : scene.images) {
    Json objects = Json::object();
    for (const auto& [label, n] : img.objects) objects[label] = n;
    images.push_back({{"appearance", img.appearance}, {"objects", objects}});
  }
  return Json{{"queried_object", scene.queried_object}, {"images", images}};
}

SyntheticScene scene_from_json(const Json& j) {
  try {
    SyntheticScene scene;
    scene.queried_object = j.at("queried_object").get<std::string>();
    for (const auto& img : j.at("images")) {
      SceneImage s;
      s.appearance = img.value("appearance", std::uint64_t{0});
      for (const auto& [label, n] : img.at("objects").items()) s.objects[label] = n.get<int>();
      scene.images.push_back(std::move(s));
    }
    scene.validate();
    return scene;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed scene: ") + e.what());
  }
}

}  // namespace dab::sim
