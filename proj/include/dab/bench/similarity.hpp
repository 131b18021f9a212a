// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dab::bench {

/// Pairwise image similarity scores, higher meaning more alike.
///
/// CSV layout: the first row is a corner cell followed by the image ids;
/// every further row starts with an image id followed by its scores.
/// Rows and columns must name the same id set, in any order.
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-6;

  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<std::string> ids, std::vector<double> scores,
                   bool symmetric = false);

  static SimilarityMatrix parse_csv(std::string_view text, bool symmetric = false,
                                    std::string_view source = "<memory>");
  static SimilarityMatrix read_csv(const std::filesystem::path& path, bool symmetric = false);
  std::string to_csv() const;

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool contains(const std::string& id) const { return index_.contains(id); }
  /// Throws DataError naming the id when either is missing.
  double score(const std::string& a, const std::string& b) const;

 private:
  std::size_t index_of(const std::string& id) const;

  std::vector<std::string> ids_;
  std::vector<double> scores_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace dab::bench
