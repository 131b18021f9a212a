// SPDX-License-Identifier: Apache-2.0
#include "dab/bench/synthetic_pool.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::bench {

const std::vector<std::string>& synthetic_vocabulary() {
  static const std::vector<std::string> vocab{
      "airplane", "apple",     "backpack", "banana",  "bench",    "bicycle",  "bird",
      "book",     "bottle",    "bowl",     "bus",     "cake",     "car",      "cat",
      "chair",    "clock",     "couch",    "cup",     "dog",      "elephant", "fork",
      "giraffe",  "horse",     "keyboard", "kite",    "knife",    "laptop",   "orange",
      "oven",     "person",    "pizza",    "sheep",   "sink",     "skateboard", "spoon",
      "train",    "truck",     "tv",       "umbrella", "vase",
  };
  return vocab;
}

namespace {

const std::vector<std::string> kCategories{"apple", "backpack", "bench",  "bicycle",
                                           "chair", "cup",      "hydrant", "laptop",
                                           "orange", "teddybear", "toaster", "umbrella"};

std::string numbered(const char* fmt, std::size_t a, std::size_t b = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

std::vector<AnnotationRecord> make_annotations(Rng& rng, const SyntheticPoolConfig& cfg) {
  const auto& vocab = synthetic_vocabulary();
  const std::size_t v = vocab.size();

  // Each theme favours a random subset of labels; "person" is everywhere.
  const auto person = static_cast<std::size_t>(
      std::find(vocab.begin(), vocab.end(), "person") - vocab.begin());
  std::vector<std::vector<double>> theme_prob(cfg.themes, std::vector<double>(v, 0.0));
  for (auto& probs : theme_prob) {
    for (auto idx : rng.sample_without_replacement(v, 8)) probs[idx] = 0.35 + 0.5 * rng.uniform01();
    for (std::size_t l = 0; l < v; ++l) {
      if (probs[l] == 0.0) probs[l] = 0.03;
    }
    probs[person] = 0.6;
  }

  std::vector<AnnotationRecord> out;
  out.reserve(cfg.images);
  for (std::size_t i = 0; i < cfg.images; ++i) {
    AnnotationRecord r;
    r.image_id = numbered("synthetic-%06zu", i + 1);
    const auto& probs = theme_prob[rng.uniform_index(cfg.themes)];
    for (std::size_t l = 0; l < v; ++l) {
      const double u = rng.uniform01();
      if (u < probs[l]) {
        ObjectAnnotation a;
        a.confidence = round_to(0.5 + 0.5 * rng.uniform01(), 3);
        a.count = 1 + static_cast<int>(rng.uniform_index(4));  // 4 falls outside the count task
        r.objects[vocab[l]] = a;
      } else if (u < probs[l] + 0.02) {
        // A weak detection that the presence threshold filters out.
        r.objects[vocab[l]] = ObjectAnnotation{round_to(0.1 + 0.39 * rng.uniform01(), 3), 1};
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

SyntheticPool make_synthetic_pool(std::uint64_t seed, const SyntheticPoolConfig& cfg) {
  if (cfg.images < 8 || cfg.themes == 0 || cfg.view_groups < 2 || cfg.min_views == 0 ||
      cfg.max_views < cfg.min_views) {
    throw ConfigError("synthetic pool: degenerate configuration");
  }
  SyntheticPool pool;
  Rng ann_rng(derive_seed(seed, "synthetic/annotations"));
  pool.annotations = make_annotations(ann_rng, cfg);

  // Each group gets a latent appearance vector near its category centre;
  // views jitter around it. Similarity is the cosine of view vectors.
  constexpr std::size_t kDim = 8;
  Rng view_rng(derive_seed(seed, "synthetic/views"));
  std::vector<std::array<double, kDim>> centres(kCategories.size());
  for (auto& c : centres) {
    for (auto& x : c) x = view_rng.normal();
  }
  std::vector<std::string> ids;
  std::vector<std::array<double, kDim>> vecs;
  for (std::size_t g = 0; g < cfg.view_groups; ++g) {
    const std::size_t cat = g % kCategories.size();
    std::array<double, kDim> base{};
    for (std::size_t d = 0; d < kDim; ++d) base[d] = centres[cat][d] + 0.6 * view_rng.normal();
    ViewGroup group;
    group.category = kCategories[cat];
    group.object_id = group.category + numbered("-%03zu", g + 1);
    const std::size_t n =
        cfg.min_views + static_cast<std::size_t>(view_rng.uniform_index(cfg.max_views - cfg.min_views + 1));
    for (std::size_t k = 0; k < n; ++k) {
      std::string id = group.object_id + numbered("/frame-%02zu", k + 1);
      std::array<double, kDim> v{};
      for (std::size_t d = 0; d < kDim; ++d) v[d] = base[d] + 0.25 * view_rng.normal();
      group.views.push_back(id);
      ids.push_back(std::move(id));
      vecs.push_back(v);
    }
    pool.groups.push_back(std::move(group));
  }

  std::vector<double> norms(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    double s = 0.0;
    for (double x : vecs[i]) s += x * x;
    norms[i] = std::sqrt(s);
  }
  const std::size_t n = ids.size();
  std::vector<double> scores(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < kDim; ++d) dot += vecs[i][d] * vecs[j][d];
      const double s = round_to(dot / (norms[i] * norms[j]), 4);
      scores[i * n + j] = s;
      scores[j * n + i] = s;
    }
  }
  pool.similarity = SimilarityMatrix(std::move(ids), std::move(scores), true);
  return pool;
}

}  // namespace dab::bench
