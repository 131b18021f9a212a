// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dab/core/attention_tensor.hpp"
#include "dab/core/segment_map.hpp"
#include "dab/sim/scene.hpp"
#include "dab/util/jsonl.hpp"

namespace dab::sim {

/// Shapes of the detection curve, all mapping 0 to 0 and non-decreasing:
///   step       - 1 at or above `threshold`, else 0;
///   saturated  - 1 for any positive input;
///   linear     - the input itself, clipped to [0, 1];
///   logistic   - a logistic in (x - threshold) * steepness, shifted so
///                that 0 maps to 0 and 1 maps to 1.
enum class CurveKind { step, saturated, linear, logistic };

std::string_view to_string(CurveKind kind);
CurveKind parse_curve_kind(std::string_view text);

/// Which text rows feed the per-image attention ratio.
enum class ReadoutLayers { final, all };

std::string_view to_string(ReadoutLayers layers);
ReadoutLayers parse_readout_layers(std::string_view text);

/// Attention-starved detection. The curve input is the image's mean
/// attention ratio times the number of images, so 1.0 is an even share of
/// a fully visual row and the default step at 0.5 fires at half that.
struct ReadoutModel {
  CurveKind curve = CurveKind::step;
  double threshold = 0.5;
  double steepness = 12.0;
  /// Cut-off on the detection probability when `sampled` is false.
  double decision_threshold = 0.5;
  /// Draw each detection with the curve's probability instead of
  /// thresholding it.
  bool sampled = true;
  ReadoutLayers layers = ReadoutLayers::final;

  double detection_probability(double mass) const;
  /// Throws ConfigError on a threshold outside (0, 1) or a steepness <= 0.
  void validate() const;
  friend bool operator==(const ReadoutModel&, const ReadoutModel&) = default;
};

Json to_json(const ReadoutModel& readout);
ReadoutModel readout_from_json(const Json& j);

/// Mean ratio of each image over the text query rows of the chosen layers
/// and all heads.
std::vector<double> mean_image_ratios(const core::AttentionTensor& tensor,
                                      const core::SegmentMap& segmap, ReadoutLayers layers);

struct ExistenceAnswer {
  bool yes = false;
  std::vector<double> mean_ratios;
  std::vector<bool> detected;
};

/// Yes iff the object is detected in every image. An image can only be
/// detected if it holds the object; image k's draw uses a stream derived
/// from `seed` and k alone, so two calls with the same seed share draws.
/// Throws DataError if the scene does not know the queried object.
ExistenceAnswer answer_existence(const core::AttentionTensor& tensor,
                                 const core::SegmentMap& segmap, const SyntheticScene& scene,
                                 const ReadoutModel& readout, std::uint64_t seed);

}  // namespace dab::sim
