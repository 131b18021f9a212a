// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "dab/core/attention_tensor.hpp"
#include "dab/core/segment_map.hpp"
#include "dab/sim/scene.hpp"
#include "dab/util/jsonl.hpp"

namespace dab::sim {

struct DecoderConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t model_dim = 32;
  std::size_t tokens_per_image = 16;
  std::size_t text_tokens = 8;
  std::uint64_t seed = 0;
  /// Added to the pre-softmax logits of every key token of the skewed image.
  double skew = 0.0;
  /// 0-based image index; unset means each scene draws its own target.
  std::optional<std::size_t> skew_target;
  /// Standard deviation of a per-image logit offset drawn from the image's
  /// appearance key. 0 disables it.
  double image_salience_spread = 0.5;

  std::size_t head_dim() const noexcept { return model_dim / heads; }
  /// Throws ConfigError on a zero count, model_dim not divisible by heads,
  /// or a negative skew or spread.
  void validate() const;
  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

Json to_json(const DecoderConfig& config);
/// Missing fields keep their defaults; unknown fields are a ConfigError.
DecoderConfig decoder_config_from_json(const Json& j);

/// Key layout of a scene: images in order, then the question text.
core::SegmentMap scene_segments(const SyntheticScene& scene, const DecoderConfig& config);

/// The image the skew applies to in this scene, if any.
std::optional<std::size_t> skew_target_for(const SyntheticScene& scene,
                                           const DecoderConfig& config);

/// Runs every layer over all tokens (no causal mask) and returns the
/// attention of every head. queries == keys.
core::AttentionTensor forward(const SyntheticScene& scene, const DecoderConfig& config);

}  // namespace dab::sim
