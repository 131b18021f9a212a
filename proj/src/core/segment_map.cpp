// SPDX-License-Identifier: Apache-2.0
#include "dab/core/segment_map.hpp"

#include <algorithm>
#include <string>

#include "dab/util/errors.hpp"

namespace dab::core {

namespace {

std::string describe(const TokenSpan& s) {
  return "[" + std::to_string(s.begin) + ", " + std::to_string(s.end) + ")";
}

}  // namespace

SegmentMap::SegmentMap(std::vector<TokenSpan> image_spans, TokenSpan text_span)
    : images_(std::move(image_spans)), text_(text_span) {
  if (images_.empty()) throw DimensionError("segment map needs at least one image span");
  for (std::size_t k = 0; k < images_.size(); ++k) {
    const auto& s = images_[k];
    if (s.end <= s.begin) {
      throw DimensionError("image span " + std::to_string(k + 1) + " " + describe(s) +
                           " is empty");
    }
    if (k > 0 && s.begin < images_[k - 1].end) {
      throw DimensionError("image span " + std::to_string(k + 1) + " " + describe(s) +
                           " overlaps or precedes image span " + std::to_string(k));
    }
  }
  if (text_.end <= text_.begin) {
    throw DimensionError("text span " + describe(text_) + " is empty");
  }

  std::vector<TokenSpan> all = images_;
  all.push_back(text_);
  std::sort(all.begin(), all.end(),
            [](const TokenSpan& a, const TokenSpan& b) { return a.begin < b.begin; });
  std::size_t cursor = 0;
  for (const auto& s : all) {
    if (s.begin != cursor) {
      throw DimensionError("spans do not tile the key axis: expected a span starting at " +
                           std::to_string(cursor) + ", found " + describe(s));
    }
    cursor = s.end;
  }
  keys_ = cursor;
}

SegmentMap SegmentMap::contiguous(std::span<const std::size_t> tokens_per_image,
                                  std::size_t text_tokens) {
  std::vector<TokenSpan> spans;
  std::size_t cursor = 0;
  for (auto n : tokens_per_image) {
    spans.push_back({cursor, cursor + n});
    cursor += n;
  }
  return SegmentMap(std::move(spans), {cursor, cursor + text_tokens});
}

SegmentMap SegmentMap::contiguous(std::size_t images, std::size_t tokens_per_image,
                                  std::size_t text_tokens) {
  std::vector<std::size_t> sizes(images, tokens_per_image);
  return contiguous(sizes, text_tokens);
}

SegmentMap SegmentMap::from_flat(std::span<const std::int64_t> flat) {
  if (flat.size() < 4 || flat.size() % 2 != 0) {
    throw DimensionError("flat span list must hold an even number (>= 4) of offsets, got " +
                         std::to_string(flat.size()));
  }
  auto to_span = [&](std::size_t i) {
    if (flat[i] < 0 || flat[i + 1] < 0) {
      throw DimensionError("flat span list contains a negative offset");
    }
    return TokenSpan{static_cast<std::size_t>(flat[i]), static_cast<std::size_t>(flat[i + 1])};
  };
  std::vector<TokenSpan> images;
  for (std::size_t i = 0; i + 2 < flat.size(); i += 2) images.push_back(to_span(i));
  return SegmentMap(std::move(images), to_span(flat.size() - 2));
}

std::vector<std::int64_t> SegmentMap::to_flat() const {
  std::vector<std::int64_t> out;
  out.reserve(2 * images_.size() + 2);
  for (const auto& s : images_) {
    out.push_back(static_cast<std::int64_t>(s.begin));
    out.push_back(static_cast<std::int64_t>(s.end));
  }
  out.push_back(static_cast<std::int64_t>(text_.begin));
  out.push_back(static_cast<std::int64_t>(text_.end));
  return out;
}

}  // namespace dab::core
