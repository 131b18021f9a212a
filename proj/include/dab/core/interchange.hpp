// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dab/core/attention_tensor.hpp"
#include "dab/core/segment_map.hpp"

namespace dab::core {

// Text interchange format for attention tensors (see docs/interchange.md).
//
// Line 1 is a compact JSON header:
//   {"format":"dab-attention","version":1,
//    "dims":{"layers":L,"heads":H,"queries":Q,"keys":K},
//    "spans":{"images":[[b,e],...],"text":[b,e]},
//    "encoding":"csv"|"base64"}
// The body follows. For "csv" it is L*H*Q lines of K comma-separated
// values in row-major order, each printed with 17 significant digits.
// For "base64" it is a single line holding the little-endian IEEE-754
// binary64 weights in the same order.

enum class Encoding { csv, base64 };

struct AttentionDump {
  AttentionTensor tensor;
  SegmentMap segmap;
};

std::string encode_interchange(const AttentionTensor& tensor, const SegmentMap& segmap,
                               Encoding encoding);

/// Throws DataError on a malformed document, DimensionError when the
/// header and body disagree, DomainError on invalid weights.
AttentionDump decode_interchange(std::string_view text);

void write_interchange(const std::filesystem::path& path, const AttentionTensor& tensor,
                       const SegmentMap& segmap, Encoding encoding);
AttentionDump read_interchange(const std::filesystem::path& path);

}  // namespace dab::core
