// SPDX-License-Identifier: Apache-2.0
#include "dab/core/interchange.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"
#include "dab/util/jsonl.hpp"

namespace dab::core {

namespace {

constexpr int kFormatVersion = 1;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return r;
  }
  return v;
}

Json span_json(const TokenSpan& s) { return Json::array({s.begin, s.end}); }

TokenSpan span_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned()) {
    throw DataError("interchange header: a span must be [begin, end] with non-negative integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::size_t dim(const Json& dims, const char* name) {
  if (!dims.contains(name) || !dims[name].is_number_unsigned()) {
    throw DataError(std::string("interchange header: dims.") + name + " missing or invalid");
  }
  return dims[name].get<std::size_t>();
}

}  // namespace

std::string encode_interchange(const AttentionTensor& tensor, const SegmentMap& segmap,
                               Encoding encoding) {
  const auto& s = tensor.shape();
  if (s.keys != segmap.keys()) {
    throw DimensionError("tensor keys and segment map disagree");
  }
  Json header;
  header["format"] = "dab-attention";
  header["version"] = kFormatVersion;
  header["dims"] = {{"layers", s.layers}, {"heads", s.heads}, {"queries", s.queries},
                    {"keys", s.keys}};
  Json images = Json::array();
  for (const auto& span : segmap.images()) images.push_back(span_json(span));
  header["spans"] = {{"images", images}, {"text", span_json(segmap.text())}};
  header["encoding"] = encoding == Encoding::csv ? "csv" : "base64";

  std::string out = header.dump();
  out += '\n';
  if (encoding == Encoding::csv) {
    char buf[32];
    for (std::size_t r = 0; r < s.rows(); ++r) {
      const auto row = tensor.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", row[k]);
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

  std::vector<std::uint8_t> bytes(s.size() * 8);
  const auto w = tensor.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(w[i]));
    std::memcpy(bytes.data() + 8 * i, &bits, 8);
  }
  out += base64_encode(bytes);
  out += '\n';
  return out;
}

AttentionDump decode_interchange(std::string_view text) {
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) throw DataError("interchange: missing header line");
  Json header;
  try {
    header = Json::parse(text.substr(0, nl));
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("interchange: invalid header: ") + e.what());
  }
  if (header.value("format", "") != "dab-attention") {
    throw DataError("interchange: header format is not 'dab-attention'");
  }
  if (header.value("version", 0) != kFormatVersion) {
    throw DataError("interchange: unsupported version");
  }
  if (!header.contains("dims") || !header.contains("spans")) {
    throw DataError("interchange: header lacks dims or spans");
  }
  const auto& dims = header["dims"];
  TensorShape shape{dim(dims, "layers"), dim(dims, "heads"), dim(dims, "queries"),
                    dim(dims, "keys")};
  const auto& spans = header["spans"];
  if (!spans.contains("images") || !spans["images"].is_array() || !spans.contains("text")) {
    throw DataError("interchange: spans need 'images' and 'text'");
  }
  std::vector<TokenSpan> images;
  for (const auto& j : spans["images"]) images.push_back(span_from_json(j));
  SegmentMap segmap(std::move(images), span_from_json(spans["text"]));
  if (segmap.keys() != shape.keys) {
    throw DimensionError("interchange: spans cover " + std::to_string(segmap.keys()) +
                         " keys but dims.keys is " + std::to_string(shape.keys));
  }

  const auto body = text.substr(nl + 1);
  const std::string encoding = header.value("encoding", "");
  std::vector<double> weights;
  weights.reserve(shape.size());
  if (encoding == "csv") {
    std::size_t pos = 0;
    std::size_t rows = 0;
    while (pos < body.size()) {
      auto end = body.find('\n', pos);
      if (end == std::string_view::npos) end = body.size();
      auto line = body.substr(pos, end - pos);
      pos = end + 1;
      if (line.empty()) continue;
      ++rows;
      std::size_t cols = 0;
      std::size_t c = 0;
      while (c <= line.size()) {
        auto comma = line.find(',', c);
        if (comma == std::string_view::npos) comma = line.size();
        const auto field = line.substr(c, comma - c);
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
          throw DataError("interchange: bad number '" + std::string(field) + "' on data row " +
                          std::to_string(rows));
        }
        weights.push_back(v);
        ++cols;
        c = comma + 1;
      }
      if (cols != shape.keys) {
        throw DimensionError("interchange: data row " + std::to_string(rows) + " has " +
                             std::to_string(cols) + " values, expected " +
                             std::to_string(shape.keys));
      }
    }
  } else if (encoding == "base64") {
    const auto bytes = base64_decode(body);
    if (bytes.size() != shape.size() * 8) {
      throw DimensionError("interchange: base64 block holds " + std::to_string(bytes.size() / 8) +
                           " values, expected " + std::to_string(shape.size()));
    }
    for (std::size_t i = 0; i < shape.size(); ++i) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, bytes.data() + 8 * i, 8);
      weights.push_back(std::bit_cast<double>(to_little_endian(bits)));
    }
  } else {
    throw DataError("interchange: unknown encoding '" + encoding + "'");
  }
  return {AttentionTensor(shape, std::move(weights)), std::move(segmap)};
}

void write_interchange(const std::filesystem::path& path, const AttentionTensor& tensor,
                       const SegmentMap& segmap, Encoding encoding) {
  write_file(path, encode_interchange(tensor, segmap, encoding));
}

AttentionDump read_interchange(const std::filesystem::path& path) {
  return decode_interchange(read_file(path));
}

}  // namespace dab::core
