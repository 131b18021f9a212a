// SPDX-License-Identifier: Apache-2.0
#include "dab/harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "dab/bench/correlation.hpp"
#include "dab/bench/count.hpp"
#include "dab/bench/existence.hpp"
#include "dab/bench/identity.hpp"
#include "dab/bench/metrics.hpp"
#include "dab/bench/sweeps.hpp"
#include "dab/bench/synthetic_pool.hpp"
#include "dab/core/interchange.hpp"
#include "dab/harness/manifest.hpp"
#include "dab/sim/simulate.hpp"
#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"
#include "dab/util/rng.hpp"

namespace dab::harness {

namespace fs = std::filesystem;

namespace {

struct Pool {
  std::vector<bench::AnnotationRecord> annotations;
  std::vector<bench::ViewGroup> groups;
  bench::SimilarityMatrix similarity;
  std::optional<bench::SyntheticPool> synthetic;
};

Pool load_pool(const PoolSettings& s, std::uint64_t seed, bool need_annotations,
               bool need_identity, RunManifest& manifest) {
  Pool pool;
  if (s.synthetic) {
    pool.synthetic = bench::make_synthetic_pool(derive_seed(seed, "pool"));
    pool.annotations = pool.synthetic->annotations;
    pool.groups = pool.synthetic->groups;
    pool.similarity = pool.synthetic->similarity;
    manifest.add_input_bytes("synthetic-annotations", bench::dump_annotations(pool.annotations));
    manifest.add_input_bytes("synthetic-view-groups", bench::dump_view_groups(pool.groups));
    manifest.add_input_bytes("synthetic-similarity", pool.similarity.to_csv());
    return pool;
  }
  if (need_annotations) {
    if (s.annotations.empty()) throw ConfigError("--annotations (or --synthetic) is required");
    pool.annotations = bench::read_annotations(s.annotations);
    manifest.add_input("annotations", s.annotations);
  }
  if (need_identity) {
    if (s.view_groups.empty() || s.similarity.empty()) {
      throw ConfigError("--view-groups and --similarity (or --synthetic) are required");
    }
    pool.groups = bench::read_view_groups(s.view_groups);
    pool.similarity = bench::SimilarityMatrix::read_csv(s.similarity);
    manifest.add_input("view-groups", s.view_groups);
    manifest.add_input("similarity", s.similarity);
  }
  return pool;
}

std::string pool_kind(const PoolSettings& s) { return s.synthetic ? "synthetic" : "files"; }

std::string short_hash(const std::string& h) { return h.substr(0, 12); }

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::max<std::size_t>(1, std::min(w, jobs));
}

// Runs fn(i) for i in [0, jobs) on a small pool; rethrows the first error.
template <typename Fn>
void parallel_for(std::size_t jobs, std::size_t workers, Fn&& fn) {
  workers = worker_count(workers, jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

Json report_with(const bench::EvalReport& r, std::size_t misses) {
  auto j = bench::to_json(r);
  j["hallucinated_misses"] = misses;
  return j;
}

}  // namespace

void run_gen_data(const CommonSettings& common, const GenDataSettings& s, std::ostream& log) {
  if (s.out.empty()) throw ConfigError("--out is required");
  RunManifest manifest;
  manifest.command = "gen-data";
  manifest.config = Json{{"seed", common.seed},
                         {"pool", pool_kind(s.pool)},
                         {"existence_per_subtype", s.existence_per_subtype},
                         {"existence_images", s.existence_images},
                         {"count_total", s.count_total},
                         {"identity_total", s.identity_total},
                         {"identity_images", s.identity_images}};
  const bool need_ann = s.existence_per_subtype > 0 || s.count_total > 0;
  const bool need_id = s.identity_total > 0;
  const auto pool = load_pool(s.pool, common.seed, need_ann, need_id, manifest);
  const auto hash = manifest.hash();
  const fs::path out(s.out);

  std::vector<bench::QAInstance> existence;
  for (auto st : {bench::Subtype::random, bench::Subtype::popular, bench::Subtype::adversarial}) {
    if (s.existence_per_subtype == 0) break;
    bench::ExistenceOptions opts;
    opts.images_per_instance = s.existence_images;
    auto set = bench::build_existence_set(pool.annotations, st, s.existence_per_subtype,
                                          derive_seed(common.seed, "existence"), opts);
    existence.insert(existence.end(), set.begin(), set.end());
  }
  const auto count = s.count_total == 0
                         ? std::vector<bench::QAInstance>{}
                         : bench::build_count_set(pool.annotations, s.count_total,
                                                  derive_seed(common.seed, "count"));
  std::vector<bench::QAInstance> identity;
  if (need_id) {
    bench::IdentityOptions opts;
    opts.images_per_instance = s.identity_images;
    identity = bench::build_identity_set(pool.groups, pool.similarity, s.identity_total,
                                         derive_seed(common.seed, "identity"), opts);
  }

  write_output(manifest, out, "existence.jsonl", bench::dump_dataset(existence, hash));
  write_output(manifest, out, "count.jsonl", bench::dump_dataset(count, hash));
  write_output(manifest, out, "identity.jsonl", bench::dump_dataset(identity, hash));
  if (pool.synthetic) {
    write_output(manifest, out, "inputs/annotations.jsonl", bench::dump_annotations(pool.annotations));
    write_output(manifest, out, "inputs/view_groups.jsonl", bench::dump_view_groups(pool.groups));
    write_output(manifest, out, "inputs/similarity.csv", pool.similarity.to_csv());
  }
  write_manifest(manifest, out);
  log << "gen-data: " << existence.size() << " existence, " << count.size() << " count, "
      << identity.size() << " identity instances -> " << s.out << " (manifest "
      << short_hash(hash) << ")\n";
}

void run_run_sim(const CommonSettings& common, const RunSimSettings& s, std::ostream& log) {
  if (s.dataset.empty()) throw ConfigError("--dataset is required");
  if (s.out.empty()) throw ConfigError("--out is required");
  RunManifest manifest;
  manifest.command = "run-sim";
  manifest.config = s.sim.to_json(common.seed);
  manifest.config["seed"] = common.seed;
  manifest.add_input("dataset", s.dataset);
  if (!s.sim.decoder_config.empty()) manifest.add_input("decoder-config", s.sim.decoder_config);
  const auto hash = manifest.hash();

  const auto instances = bench::read_dataset(s.dataset);
  const auto decoder = s.sim.decoder(common.seed);
  const auto readout = s.sim.readout();
  const auto rebalance = s.sim.rebalance();
  const fs::path out(s.out);

  const auto base = sim::simulate_suite(instances, decoder, readout, std::nullopt, common.workers);
  write_output(manifest, out, "predictions-baseline.jsonl", bench::dump_predictions(base, hash));
  Json summary{{"manifest", hash}, {"instances", instances.size()}};
  const auto base_report = bench::evaluate(instances, base, "baseline");
  summary["baseline"] = report_with(base_report, sim::hallucinated_misses(instances, base));
  log << "run-sim: baseline accuracy " << format_fixed(100.0 * base_report.accuracy, 2);

  if (s.sim.dab) {
    const auto dab = sim::simulate_suite(instances, decoder, readout, rebalance, common.workers);
    write_output(manifest, out, "predictions-dab.jsonl", bench::dump_predictions(dab, hash));
    const auto dab_report = bench::evaluate(instances, dab, "dab");
    summary["dab"] = report_with(dab_report, sim::hallucinated_misses(instances, dab));
    log << ", with balancing " << format_fixed(100.0 * dab_report.accuracy, 2);
  }
  write_output(manifest, out, "summary.json", summary.dump(2) + "\n");

  for (std::size_t i = 0; i < std::min(s.dump_attention, instances.size()); ++i) {
    const auto scene = sim::scene_from_instance(instances[i]);
    const auto segmap = sim::scene_segments(scene, decoder);
    const auto tensor = sim::forward(scene, decoder);
    const std::string stem = "attention/" + instances[i].id;
    write_output(manifest, out, stem + ".baseline.dabt",
                 core::encode_interchange(tensor, segmap, core::Encoding::base64));
    if (s.sim.dab) {
      const auto adjusted = core::rebalance_tensor(tensor, segmap, rebalance).adjusted;
      write_output(manifest, out, stem + ".dab.dabt",
                   core::encode_interchange(adjusted, segmap, core::Encoding::base64));
    }
  }
  write_manifest(manifest, out);
  log << " over " << instances.size() << " instances -> " << s.out << " (manifest "
      << short_hash(hash) << ")\n";
}

void run_eval(const CommonSettings& common, const EvalSettings& s, std::ostream& log) {
  if (s.datasets.empty()) throw ConfigError("at least one --dataset is required");
  if (s.predictions.empty()) throw ConfigError("--predictions is required");
  if (s.out.empty()) throw ConfigError("--out is required");
  RunManifest manifest;
  manifest.command = "eval";
  manifest.config = Json{{"seed", common.seed}};
  std::vector<bench::QAInstance> all;
  std::set<std::string> ids;
  for (const auto& path : s.datasets) {
    manifest.add_input("dataset", path);
    for (auto& inst : bench::read_dataset(path)) {
      if (!ids.insert(inst.id).second) {
        throw DataError("instance id '" + inst.id + "' appears in more than one dataset");
      }
      all.push_back(std::move(inst));
    }
  }
  manifest.add_input("predictions", s.predictions);
  const auto preds = bench::read_predictions(s.predictions);
  bench::evaluate(all, preds);  // reports every missing id at once
  const auto hash = manifest.hash();

  auto subset = [&](auto keep) {
    std::vector<bench::QAInstance> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out), keep);
    return out;
  };
  std::vector<bench::EvalReport> rows;
  std::vector<bench::EvalReport> subtype_rows;
  for (auto st : {bench::Subtype::random, bench::Subtype::popular, bench::Subtype::adversarial}) {
    const auto part = subset([&](const bench::QAInstance& q) {
      return q.task == bench::TaskKind::existence && q.subtype == st;
    });
    if (part.empty()) continue;
    subtype_rows.push_back(bench::evaluate(part, preds, "existence/" + std::string(to_string(st))));
    rows.push_back(subtype_rows.back());
  }
  if (!subtype_rows.empty()) rows.push_back(bench::macro_average(subtype_rows, "existence/average"));
  for (auto task : {bench::TaskKind::count, bench::TaskKind::identity}) {
    const auto part = subset([&](const bench::QAInstance& q) { return q.task == task; });
    if (!part.empty()) rows.push_back(bench::evaluate(part, preds, std::string(to_string(task))));
  }

  Json reports = Json::array();
  for (const auto& r : rows) reports.push_back(bench::to_json(r));
  const fs::path out(s.out);
  write_output(manifest, out, "report.json",
               Json{{"manifest", hash}, {"reports", reports}}.dump(2) + "\n");
  std::string csv = std::string(bench::kReportCsvHeader) + ",manifest\n";
  for (const auto& r : rows) csv += bench::to_csv_row(r) + "," + hash + "\n";
  write_output(manifest, out, "report.csv", csv);
  write_manifest(manifest, out);
  log << "eval: " << rows.size() << " report rows over " << all.size() << " instances -> " << s.out
      << " (manifest " << short_hash(hash) << ")\n";
}

void run_sweep(const CommonSettings& common, const SweepSettings& s, std::ostream& log) {
  if (s.out.empty()) throw ConfigError("--out is required");
  const bool image_count = s.kind == "image-count";
  const bool neg_position = s.kind == "negative-position";
  const bool neg_ratio = s.kind == "negative-ratio";
  if (!image_count && !neg_position && !neg_ratio) {
    throw ConfigError("--kind must be image-count, negative-position or negative-ratio");
  }
  std::vector<std::size_t> points;
  if (s.points == "default") {
    if (image_count) points = bench::kDefaultSweepLengths;
    if (neg_position) {
      for (std::size_t p = 1; p <= s.seq_len; ++p) points.push_back(p);
    }
    if (neg_ratio) points = {2, 3, 4, 5};
  } else {
    points = parse_point_list(s.points);
  }
  const bool simulate = image_count && s.simulate && s.predictions_dir.empty();

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.config = Json{{"seed", common.seed},
                         {"kind", s.kind},
                         {"points", points},
                         {"per_point", s.per_point},
                         {"pool", pool_kind(s.pool)}};
  if (neg_position) manifest.config["seq_len"] = s.seq_len;
  if (simulate) manifest.config["sim"] = s.sim.to_json(common.seed);
  const auto pool = load_pool(s.pool, common.seed, image_count, !image_count, manifest);
  std::map<std::size_t, fs::path> external;
  if (!s.predictions_dir.empty()) {
    for (auto p : points) {
      const fs::path f = fs::path(s.predictions_dir) / ("predictions-" + std::to_string(p) + ".jsonl");
      if (fs::exists(f)) {
        external[p] = f;
        manifest.add_input("predictions-" + std::to_string(p), f);
      }
    }
  }
  const auto hash = manifest.hash();

  // Datasets for every point; cheap next to simulation.
  const auto seed = derive_seed(common.seed, "sweep/" + s.kind);
  bench::SweepDatasets sets;
  if (image_count) {
    sets = bench::sweep_image_count(pool.annotations, points, s.per_point, seed);
  } else if (neg_position) {
    for (auto p : points) {
      if (p < 1 || p > s.seq_len) {
        throw ConfigError("negative position " + std::to_string(p) + " is outside 1.." +
                          std::to_string(s.seq_len));
      }
    }
    auto all = bench::sweep_negative_position(pool.groups, pool.similarity, s.seq_len,
                                              s.per_point, seed);
    for (auto p : points) sets[p] = std::move(all[p]);
  } else {
    sets = bench::sweep_negative_ratio(pool.groups, pool.similarity, points, s.per_point, seed);
  }

  struct PointResult {
    std::optional<bench::EvalReport> base, dab;
    std::vector<bench::PredictionRecord> base_preds, dab_preds;
  };
  std::vector<PointResult> results(points.size());
  std::optional<sim::DecoderConfig> decoder;
  if (simulate) decoder = s.sim.decoder(common.seed);
  parallel_for(points.size(), common.workers, [&](std::size_t i) {
    const auto& set = sets.at(points[i]);
    auto& r = results[i];
    if (simulate) {
      r.base_preds = sim::simulate_suite(set, *decoder, s.sim.readout(), std::nullopt, 1);
      r.base = bench::evaluate(set, r.base_preds);
      if (s.sim.dab) {
        r.dab_preds = sim::simulate_suite(set, *decoder, s.sim.readout(), s.sim.rebalance(), 1);
        r.dab = bench::evaluate(set, r.dab_preds);
      }
    } else if (external.contains(points[i])) {
      r.base = bench::evaluate(set, bench::read_predictions(external.at(points[i])));
    }
  });

  const fs::path out(s.out);
  std::string csv = std::string(kSweepCsvHeader) + "\n";
  std::size_t gaps = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    const auto tag = std::to_string(p);
    const auto& set = sets.at(p);
    const auto& r = results[i];
    write_output(manifest, out, "dataset-" + tag + ".jsonl", bench::dump_dataset(set, hash));
    if (!r.base_preds.empty()) {
      write_output(manifest, out, "predictions-" + tag + ".jsonl",
                   bench::dump_predictions(r.base_preds, hash));
    }
    if (!r.dab_preds.empty()) {
      write_output(manifest, out, "predictions-dab-" + tag + ".jsonl",
                   bench::dump_predictions(r.dab_preds, hash));
    }
    std::string ratio;
    if (neg_ratio) ratio = format_fixed(1.0 / static_cast<double>(p + 1), 4);
    csv += s.kind + "," + tag + "," + ratio + "," + std::to_string(set.size()) + ",";
    if (r.base) {
      Json rep{{"manifest", hash}, {"point", p}, {"baseline", bench::to_json(*r.base)}};
      csv += format_fixed(100.0 * r.base->accuracy, 2) + "," + format_fixed(100.0 * r.base->f1, 2);
      if (r.dab) {
        rep["dab"] = bench::to_json(*r.dab);
        csv += "," + format_fixed(100.0 * r.dab->accuracy, 2) + "," + format_fixed(100.0 * r.dab->f1, 2);
      } else {
        csv += ",,";
      }
      csv += ",ok";
      write_output(manifest, out, "report-" + tag + ".json", rep.dump(2) + "\n");
    } else {
      csv += ",,,,missing";
      ++gaps;
    }
    csv += "," + hash + "\n";
  }
  write_output(manifest, out, "sweep.csv", csv);
  write_manifest(manifest, out);
  log << "sweep " << s.kind << ": " << points.size() << " points, " << gaps
      << " without predictions -> " << s.out << " (manifest " << short_hash(hash) << ")\n";
}

void run_report(const CommonSettings& common, const ReportSettings& s, std::ostream& log) {
  if (s.out.empty()) throw ConfigError("--out is required");
  if (s.eval_reports.empty() && s.hallucination_pairs.empty()) {
    throw ConfigError("give --eval-report and/or --hallucination-pairs");
  }
  RunManifest manifest;
  manifest.command = "report";
  manifest.config = Json{{"seed", common.seed}};
  for (const auto& p : s.eval_reports) manifest.add_input("eval-report", p);
  if (!s.hallucination_pairs.empty()) manifest.add_input("hallucination-pairs", s.hallucination_pairs);
  const auto hash = manifest.hash();
  const fs::path out(s.out);

  if (!s.eval_reports.empty()) {
    std::string csv = "source,name,accuracy,precision,recall,f1,yes_ratio,manifest\n";
    std::string md = "| Source | Subset | Accuracy | Precision | Recall | F1 | Yes ratio |\n"
                     "|---|---|---:|---:|---:|---:|---:|\n";
    for (const auto& path : s.eval_reports) {
      Json j;
      try {
        j = Json::parse(read_file(path));
      } catch (const Json::exception& e) {
        throw DataError(path + ": " + e.what());
      }
      if (!j.contains("reports") || !j["reports"].is_array()) {
        throw DataError(path + ": not an eval report (no 'reports' array)");
      }
      const auto source = fs::path(path).parent_path().filename().string();
      for (const auto& r : j["reports"]) {
        std::vector<std::string> cells;
        for (const char* k : {"accuracy", "precision", "recall", "f1", "yes_ratio"}) {
          if (!r.contains(k) || !r[k].is_number()) throw DataError(path + ": report row lacks " + k);
          cells.push_back(format_fixed(r[k].get<double>(), 2));
        }
        const auto name = r.value("name", std::string());
        csv += source + "," + name;
        md += "| " + source + " | " + name;
        for (const auto& c : cells) {
          csv += "," + c;
          md += " | " + c;
        }
        csv += "," + hash + "\n";
        md += " |\n";
      }
    }
    write_output(manifest, out, "table.csv", csv);
    write_output(manifest, out, "table.md", md + "\nmanifest " + hash + "\n");
  }
  if (!s.hallucination_pairs.empty()) {
    const auto pairs = bench::read_hallucination_pairs(s.hallucination_pairs);
    auto j = bench::to_json(bench::correlation_analysis(pairs));
    j["manifest"] = hash;
    write_output(manifest, out, "correlation.json", j.dump(2) + "\n");
  }
  write_manifest(manifest, out);
  log << "report: " << manifest.outputs.size() << " files -> " << s.out << " (manifest "
      << short_hash(hash) << ")\n";
}

}  // namespace dab::harness
