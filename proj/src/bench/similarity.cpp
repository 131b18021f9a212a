// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/similarity.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"

namespace dab::bench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> ids, std::vector<double> scores,
                                   bool symmetric)
    : ids_(std::move(ids)), scores_(std::move(scores)) {
  const std::size_t n = ids_.size();
  if (scores_.size() != n * n) {
    throw DataError("similarity matrix over " + std::to_string(n) + " ids needs " +
                    std::to_string(n * n) + " scores, got " + std::to_string(scores_.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw DataError("similarity matrix lists id '" + ids_[i] + "' twice");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = scores_[i * n + j];
      if (!std::isfinite(s)) {
        throw DataError("similarity(" + ids_[i] + ", " + ids_[j] + ") is not finite");
      }
      if (symmetric && std::abs(s - scores_[j * n + i]) > kSymmetryTolerance) {
        throw DataError("similarity matrix declared symmetric but (" + ids_[i] + ", " + ids_[j] +
                        ") differs from its transpose");
      }
    }
  }
}

SimilarityMatrix SimilarityMatrix::parse_csv(std::string_view text, bool symmetric,
                                             std::string_view source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(start, nl - start));
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  const std::string where(source);
  if (lines.empty()) throw DataError(where + ": empty similarity CSV");

  const auto header = split_csv_line(lines[0]);
  std::vector<std::string> ids;
  for (std::size_t c = 1; c < header.size(); ++c) ids.emplace_back(header[c]);
  const std::size_t n = ids.size();
  if (lines.size() - 1 != n) {
    throw DataError(where + ": header names " + std::to_string(n) + " ids but there are " +
                    std::to_string(lines.size() - 1) + " data rows");
  }
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < n; ++i) col.emplace(ids[i], i);

  std::vector<double> scores(n * n, 0.0);
  std::vector<char> seen(n, 0);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    const std::string row_id(cells[0]);
    const auto it = col.find(row_id);
    if (it == col.end()) {
      throw DataError(where + ":" + std::to_string(r + 1) + ": row id '" + row_id +
                      "' is not in the header");
    }
    if (seen[it->second]++) {
      throw DataError(where + ":" + std::to_string(r + 1) + ": duplicate row '" + row_id + "'");
    }
    if (cells.size() != n + 1) {
      throw DataError(where + ":" + std::to_string(r + 1) + ": expected " +
                      std::to_string(n) + " scores, got " + std::to_string(cells.size() - 1));
    }
    for (std::size_t c = 0; c < n; ++c) {
      double v = 0.0;
      const auto cell = cells[c + 1];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw DataError(where + ":" + std::to_string(r + 1) + ": bad score '" +
                        std::string(cell) + "'");
      }
      scores[it->second * n + c] = v;
    }
  }
  return SimilarityMatrix(std::move(ids), std::move(scores), symmetric);
}

SimilarityMatrix SimilarityMatrix::read_csv(const std::filesystem::path& path, bool symmetric) {
  return parse_csv(read_file(path), symmetric, path.string());
}

std::string SimilarityMatrix::to_csv() const {
  std::string out = "id";
  for (const auto& id : ids_) out += "," + id;
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out += ids_[i];
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", scores_[i * ids_.size() + j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::size_t SimilarityMatrix::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw DataError("similarity matrix has no row for image '" + id + "'");
  return it->second;
}

double SimilarityMatrix::score(const std::string& a, const std::string& b) const {
  return scores_[index_of(a) * ids_.size() + index_of(b)];
}

}  // namespace dab::bench
