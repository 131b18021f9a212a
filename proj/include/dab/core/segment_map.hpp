// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dab::core {

/// Half-open range [begin, end) over the key axis.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(std::size_t index) const noexcept { return index >= begin && index < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

/// Partition of the key axis into n image spans and one text span.
///
/// Image spans are stored in input order (image 1 first) and must appear
/// in ascending key order. Together with the text span they cover
/// [0, keys) exactly, with no gaps or overlaps and no empty span.
class SegmentMap {
 public:
  /// Throws DimensionError when the spans do not form a valid partition.
  SegmentMap(std::vector<TokenSpan> image_spans, TokenSpan text_span);

  /// Images laid out back to back, followed by the text tokens.
  static SegmentMap contiguous(std::span<const std::size_t> tokens_per_image,
                               std::size_t text_tokens);
  static SegmentMap contiguous(std::size_t images, std::size_t tokens_per_image,
                               std::size_t text_tokens);

  /// Decodes [b1, e1, b2, e2, ..., bn, en, text_b, text_e].
  static SegmentMap from_flat(std::span<const std::int64_t> flat);
  std::vector<std::int64_t> to_flat() const;

  std::size_t image_count() const noexcept { return images_.size(); }
  const TokenSpan& image(std::size_t k) const { return images_.at(k); }
  const std::vector<TokenSpan>& images() const noexcept { return images_; }
  const TokenSpan& text() const noexcept { return text_; }
  std::size_t keys() const noexcept { return keys_; }

  friend bool operator==(const SegmentMap&, const SegmentMap&) = default;

 private:
  std::vector<TokenSpan> images_;
  TokenSpan text_;
  std::size_t keys_ = 0;
};

}  // namespace dab::core
