// SPDX-License-Identifier: Apache-2.0
#include "dab/sim/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::sim {

void DecoderConfig::validate() const {
  if (layers == 0 || heads == 0 || model_dim == 0 || tokens_per_image == 0 || text_tokens == 0) {
    throw ConfigError("decoder counts must all be at least 1");
  }
  if (model_dim % heads != 0) {
    throw ConfigError("model_dim " + std::to_string(model_dim) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (!(skew >= 0.0) || !std::isfinite(skew)) throw ConfigError("skew must be finite and >= 0");
  if (!(image_salience_spread >= 0.0) || !std::isfinite(image_salience_spread)) {
    throw ConfigError("image_salience_spread must be finite and >= 0");
  }
}

Json to_json(const DecoderConfig& c) {
  Json j{{"layers", c.layers},
         {"heads", c.heads},
         {"model_dim", c.model_dim},
         {"tokens_per_image", c.tokens_per_image},
         {"text_tokens", c.text_tokens},
         {"seed", c.seed},
         {"skew", c.skew}};
  if (c.skew_target) {
    j["skew_target"] = *c.skew_target;
  } else {
    j["skew_target"] = "random";
  }
  j["image_salience_spread"] = c.image_salience_spread;
  return j;
}

DecoderConfig decoder_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("decoder config must be a JSON object");
  static const std::set<std::string> known{"layers", "heads", "model_dim", "tokens_per_image",
                                           "text_tokens", "seed", "skew", "skew_target",
                                           "image_salience_spread"};
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw ConfigError("unknown decoder config field '" + k + "'");
  }
  DecoderConfig c;
  try {
    c.layers = j.value("layers", c.layers);
    c.heads = j.value("heads", c.heads);
    c.model_dim = j.value("model_dim", c.model_dim);
    c.tokens_per_image = j.value("tokens_per_image", c.tokens_per_image);
    c.text_tokens = j.value("text_tokens", c.text_tokens);
    c.seed = j.value("seed", c.seed);
    c.skew = j.value("skew", c.skew);
    c.image_salience_spread = j.value("image_salience_spread", c.image_salience_spread);
    if (j.contains("skew_target")) {
      const auto& t = j["skew_target"];
      if (t.is_string() && t.get<std::string>() == "random") {
        c.skew_target.reset();
      } else if (t.is_number_unsigned()) {
        c.skew_target = t.get<std::size_t>();
      } else {
        throw ConfigError("skew_target must be \"random\" or a non-negative image index");
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("decoder config field has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

core::SegmentMap scene_segments(const SyntheticScene& scene, const DecoderConfig& config) {
  return core::SegmentMap::contiguous(scene.images.size(), config.tokens_per_image,
                                      config.text_tokens);
}

std::optional<std::size_t> skew_target_for(const SyntheticScene& scene,
                                           const DecoderConfig& config) {
  if (config.skew == 0.0) return std::nullopt;
  if (config.skew_target) {
    if (*config.skew_target >= scene.images.size()) {
      throw ConfigError("skew_target " + std::to_string(*config.skew_target) +
                        " is outside a scene of " + std::to_string(scene.images.size()) +
                        " images");
    }
    return config.skew_target;
  }
  std::uint64_t key = derive_seed(config.seed, "skew-target");
  for (const auto& img : scene.images) key = splitmix64(key ^ img.appearance);
  Rng rng(key);
  return static_cast<std::size_t>(rng.uniform_index(scene.images.size()));
}

namespace {

using Matrix = std::vector<double>;  // row-major

void unit_gaussian(Rng& rng, double* out, std::size_t n) {
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = rng.normal();
    norm += out[i] * out[i];
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < n; ++i) out[i] /= norm;
}

void normalize_rows(Matrix& h, std::size_t rows, std::size_t dim) {
  for (std::size_t r = 0; r < rows; ++r) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += h[r * dim + d] * h[r * dim + d];
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t d = 0; d < dim; ++d) h[r * dim + d] /= norm;
    }
  }
}

// rows x dim times dim x out (weights stored dim x out).
Matrix project(const Matrix& h, std::size_t rows, std::size_t dim, const Matrix& w,
               std::size_t out) {
  Matrix p(rows * out, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double x = h[r * dim + d];
      for (std::size_t o = 0; o < out; ++o) p[r * out + o] += x * w[d * out + o];
    }
  }
  return p;
}

std::uint64_t image_key(const DecoderConfig& config, const SceneImage& img) {
  std::string objects;
  for (const auto& [label, n] : img.objects) {
    if (n > 0) objects += label + "=" + std::to_string(n) + ";";
  }
  return derive_seed(derive_seed(config.seed, img.appearance), "image/" + objects);
}

}  // namespace

core::AttentionTensor forward(const SyntheticScene& scene, const DecoderConfig& config) {
  config.validate();
  scene.validate();
  const std::size_t n = scene.images.size();
  const std::size_t tpi = config.tokens_per_image;
  const std::size_t keys = n * tpi + config.text_tokens;
  const std::size_t dim = config.model_dim;
  const std::size_t dk = config.head_dim();

  // Input states: image tokens, then question tokens.
  Matrix h(keys * dim);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(image_key(config, scene.images[k]));
    for (std::size_t t = 0; t < tpi; ++t) unit_gaussian(rng, &h[(k * tpi + t) * dim], dim);
  }
  {
    Rng rng(derive_seed(config.seed, "text/" + scene.queried_object));
    for (std::size_t t = 0; t < config.text_tokens; ++t) {
      unit_gaussian(rng, &h[(n * tpi + t) * dim], dim);
    }
  }

  // Per-key logit offsets: image salience plus the skew.
  std::vector<double> bias(keys, 0.0);
  const auto target = skew_target_for(scene, config);
  for (std::size_t k = 0; k < n; ++k) {
    double b = 0.0;
    if (config.image_salience_spread > 0.0) {
      Rng rng(derive_seed(derive_seed(config.seed, scene.images[k].appearance), "salience"));
      b = config.image_salience_spread * rng.normal();
    }
    if (target && *target == k) b += config.skew;
    std::fill(bias.begin() + static_cast<std::ptrdiff_t>(k * tpi),
              bias.begin() + static_cast<std::ptrdiff_t>((k + 1) * tpi), b);
  }

  const core::TensorShape shape{config.layers, config.heads, keys, keys};
  std::vector<double> weights(shape.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<double> logits(keys);

  for (std::size_t l = 0; l < config.layers; ++l) {
    Matrix update(keys * dim, 0.0);
    for (std::size_t hd = 0; hd < config.heads; ++hd) {
      Rng wrng(derive_seed(derive_seed(config.seed, "weights"), l * config.heads + hd));
      Matrix wq(dim * dk), wk(dim * dk), wv(dim * dk);
      for (auto* w : {&wq, &wk, &wv}) {
        for (auto& x : *w) x = wrng.normal();
      }
      const auto q = project(h, keys, dim, wq, dk);
      const auto kk = project(h, keys, dim, wk, dk);
      const auto v = project(h, keys, dim, wv, dk);

      for (std::size_t i = 0; i < keys; ++i) {
        double mx = -HUGE_VAL;
        for (std::size_t j = 0; j < keys; ++j) {
          double s = 0.0;
          for (std::size_t d = 0; d < dk; ++d) s += q[i * dk + d] * kk[j * dk + d];
          logits[j] = s * scale + bias[j];
          mx = std::max(mx, logits[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < keys; ++j) {
          logits[j] = std::exp(logits[j] - mx);
          total += logits[j];
        }
        double* row = &weights[(((l * config.heads) + hd) * keys + i) * keys];
        for (std::size_t j = 0; j < keys; ++j) row[j] = logits[j] / total;
        for (std::size_t j = 0; j < keys; ++j) {
          for (std::size_t d = 0; d < dk; ++d) update[i * dim + hd * dk + d] += row[j] * v[j * dk + d];
        }
      }
    }
    for (std::size_t x = 0; x < h.size(); ++x) h[x] += update[x];
    normalize_rows(h, keys, dim);
  }
  return core::AttentionTensor(shape, std::move(weights));
}

}  // namespace dab::sim
