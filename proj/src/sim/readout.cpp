// SPDX-License-Identifier: Apache-2.0
#include "dab/sim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dab/core/rebalance.hpp"
#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::sim {

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::step: return "step";
    case CurveKind::saturated: return "saturated";
    case CurveKind::linear: return "linear";
    case CurveKind::logistic: return "logistic";
  }
  return "step";
}

CurveKind parse_curve_kind(std::string_view text) {
  if (text == "step") return CurveKind::step;
  if (text == "saturated") return CurveKind::saturated;
  if (text == "linear") return CurveKind::linear;
  if (text == "logistic") return CurveKind::logistic;
  throw ConfigError("unknown detection curve '" + std::string(text) +
                    "' (expected step, saturated, linear or logistic)");
}

std::string_view to_string(ReadoutLayers layers) {
  return layers == ReadoutLayers::final ? "final" : "all";
}

ReadoutLayers parse_readout_layers(std::string_view text) {
  if (text == "final") return ReadoutLayers::final;
  if (text == "all") return ReadoutLayers::all;
  throw ConfigError("unknown readout layers '" + std::string(text) + "' (expected final or all)");
}

void ReadoutModel::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("curve threshold must lie in (0, 1)");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ConfigError("decision_threshold must lie in (0, 1)");
  }
  if (!(steepness > 0.0) || !std::isfinite(steepness)) throw ConfigError("steepness must be > 0");
}

double ReadoutModel::detection_probability(double mass) const {
  const double x = std::clamp(mass, 0.0, 1.0);
  switch (curve) {
    case CurveKind::step: return x >= threshold ? 1.0 : 0.0;
    case CurveKind::saturated: return x > 0.0 ? 1.0 : 0.0;
    case CurveKind::linear: return x;
    case CurveKind::logistic: {
      auto s = [&](double v) { return 1.0 / (1.0 + std::exp(-steepness * (v - threshold))); };
      const double lo = s(0.0);
      const double hi = s(1.0);
      return std::clamp((s(x) - lo) / (hi - lo), 0.0, 1.0);
    }
  }
  return 0.0;
}

Json to_json(const ReadoutModel& r) {
  return Json{{"curve", to_string(r.curve)},
              {"threshold", r.threshold},
              {"steepness", r.steepness},
              {"decision_threshold", r.decision_threshold},
              {"sampled", r.sampled},
              {"layers", to_string(r.layers)}};
}

ReadoutModel readout_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("readout config must be a JSON object");
  static const std::set<std::string> known{"curve",   "threshold", "steepness",
                                           "decision_threshold", "sampled", "layers"};
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw ConfigError("unknown readout field '" + k + "'");
  }
  ReadoutModel r;
  try {
    if (j.contains("curve")) r.curve = parse_curve_kind(j["curve"].get<std::string>());
    r.threshold = j.value("threshold", r.threshold);
    r.steepness = j.value("steepness", r.steepness);
    r.decision_threshold = j.value("decision_threshold", r.decision_threshold);
    r.sampled = j.value("sampled", r.sampled);
    if (j.contains("layers")) r.layers = parse_readout_layers(j["layers"].get<std::string>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("readout field has the wrong type: ") + e.what());
  }
  r.validate();
  return r;
}

std::vector<double> mean_image_ratios(const core::AttentionTensor& tensor,
                                      const core::SegmentMap& segmap, ReadoutLayers layers) {
  const auto& shape = tensor.shape();
  if (shape.keys != segmap.keys()) {
    throw DimensionError("tensor has " + std::to_string(shape.keys) + " keys, segment map covers " +
                         std::to_string(segmap.keys()));
  }
  const auto queries = core::text_queries(shape, segmap);
  const std::size_t first = layers == ReadoutLayers::final ? shape.layers - 1 : 0;
  std::vector<double> sum(segmap.image_count(), 0.0);
  std::size_t rows = 0;
  for (std::size_t l = first; l < shape.layers; ++l) {
    for (std::size_t h = 0; h < shape.heads; ++h) {
      for (auto q : queries) {
        const auto r = core::segment_ratios(tensor.row(l, h, q), segmap);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += r.per_image[k];
        ++rows;
      }
    }
  }
  if (rows > 0) {
    for (auto& s : sum) s /= static_cast<double>(rows);
  }
  return sum;
}

ExistenceAnswer answer_existence(const core::AttentionTensor& tensor,
                                 const core::SegmentMap& segmap, const SyntheticScene& scene,
                                 const ReadoutModel& readout, std::uint64_t seed) {
  readout.validate();
  if (!scene.knows_queried_object()) {
    throw DataError("scene does not know the queried object '" + scene.queried_object + "'");
  }
  if (scene.images.size() != segmap.image_count()) {
    throw DimensionError("scene has " + std::to_string(scene.images.size()) +
                         " images, segment map has " + std::to_string(segmap.image_count()));
  }
  ExistenceAnswer out;
  out.mean_ratios = mean_image_ratios(tensor, segmap, readout.layers);
  const double n = static_cast<double>(scene.images.size());
  out.yes = true;
  for (std::size_t k = 0; k < scene.images.size(); ++k) {
    const double p = readout.detection_probability(out.mean_ratios[k] * n);
    Rng rng(derive_seed(seed, k));
    const double u = rng.uniform01();
    const bool fires = readout.sampled ? u < p : p >= readout.decision_threshold;
    const bool detected = scene.images[k].contains(scene.queried_object) && fires;
    out.detected.push_back(detected);
    out.yes = out.yes && detected;
  }
  return out;
}

}  // namespace dab::sim
