// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "dab/bench/count.hpp"
#include "dab/bench/existence.hpp"
#include "dab/bench/labels.hpp"
#include "dab/bench/metrics.hpp"
#include "dab/bench/sweeps.hpp"
#include "dab/bench/synthetic_pool.hpp"
#include "dab/core/rebalance.hpp"
#include "dab/harness/commands.hpp"
#include "dab/sim/simulate.hpp"
#include "dab/util/digest.hpp"
#include "dab/util/jsonl.hpp"
#include "dab/util/rng.hpp"
#include "rebalance_oracle.hpp"

namespace fs = std::filesystem;
using namespace dab;
using core::ClampMode;
using core::RebalanceConfig;
using core::SegmentMap;

namespace {

constexpr double kOracleTol = 1e-12;
constexpr double kRowSumTol = 1e-9;
constexpr double kMassTol = 1e-12;
constexpr double kContractionTol = 1e-12;
constexpr double kExampleTol = 1e-12;
constexpr std::size_t kCorpusRows = 1000;
constexpr std::uint64_t kCorpusSeed = 20240611;
constexpr double kOracleSeconds = 5.0;
constexpr double kSimSeconds = 60.0;
constexpr std::uint64_t kRunSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<testing::RandomRowCase> corpus() {
  Rng rng(kCorpusSeed);
  std::vector<testing::RandomRowCase> rows;
  for (std::size_t i = 0; i < kCorpusRows; ++i) rows.push_back(testing::random_row_case(rng, 32, 5));
  return rows;
}

SegmentMap map_of(const testing::RandomRowCase& c) {
  return SegmentMap::contiguous(c.image_sizes, c.text_tokens);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Outcome kernel_oracle() {
  const auto rows = corpus();
  Rng params(derive_seed(kCorpusSeed, "oracle-params"));
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t clamp_mismatch = 0, clamped_rows = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& c = rows[i];
    RebalanceConfig cfg;
    cfg.alpha = params.uniform01();
    const bool renorm = i % 4 == 3;
    cfg.clamp_mode = renorm ? ClampMode::renormalize : ClampMode::redistribute;
    const auto got = core::rebalance_row(c.row, map_of(c), cfg);
    const auto want = testing::oracle_rebalance(c.row, c.spans, cfg.alpha, cfg.tau, renorm);
    worst = std::max(worst, max_abs_diff(got.weights, want.row));
    if (got.clamp_events != want.clamps) ++clamp_mismatch;
    if (want.clamps) ++clamped_rows;
  }
  const double secs = seconds_since(t0);
  return {worst <= kOracleTol && clamp_mismatch == 0 && secs < kOracleSeconds,
          std::to_string(rows.size()) + " rows (" + std::to_string(clamped_rows) +
              " clamped), max |diff| " + fmt("%.3g", worst) + " <= 1e-12, clamp count mismatches " +
              std::to_string(clamp_mismatch) + ", " + fmt("%.3f", secs) + " s < 5 s"};
}

Outcome conservation() {
  const auto rows = corpus();
  double worst_sum = 0.0, worst_mass = 0.0;
  std::size_t text_changed = 0, checked = 0;
  for (double alpha : {0.25, 0.5, 1.0}) {
    RebalanceConfig cfg;
    cfg.alpha = alpha;
    for (const auto& c : rows) {
      const auto m = map_of(c);
      const auto out = core::rebalance_row(c.row, m, cfg);
      double sum = 0.0;
      for (double w : out.weights) sum += w;
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      const double before = core::segment_ratios(c.row, m).total_visual;
      const double after = core::segment_ratios(out.weights, m).total_visual;
      worst_mass = std::max(worst_mass, std::abs(after - before));
      for (std::size_t i = c.spans.text.first; i < c.spans.text.second; ++i) {
        if (out.weights[i] != c.row[i]) ++text_changed;
      }
      ++checked;
    }
  }
  return {worst_sum <= kRowSumTol && worst_mass <= kMassTol && text_changed == 0,
          std::to_string(checked) + " rows at alpha 0.25/0.5/1, max |sum-1| " +
              fmt("%.3g", worst_sum) + " <= 1e-9, max visual mass drift " + fmt("%.3g", worst_mass) +
              " <= 1e-12, text weights changed " + std::to_string(text_changed)};
}

Outcome contraction() {
  const auto rows = corpus();
  double worst = 0.0, worst_equal = 0.0;
  std::size_t checked = 0, identity_breaks = 0;
  std::map<double, std::size_t> per_alpha;
  for (double alpha : {0.25, 0.5, 1.0}) {
    RebalanceConfig cfg;
    cfg.alpha = alpha;
    for (const auto& c : rows) {
      const auto m = map_of(c);
      const auto out = core::rebalance_row(c.row, m, cfg);
      if (!out.eligible || out.clamp_events != 0) continue;
      const auto before = core::segment_ratios(c.row, m);
      const auto after = core::segment_ratios(out.weights, m);
      for (std::size_t k = 0; k < before.per_image.size(); ++k) {
        const double want = before.avg_ratio + (1.0 - alpha) * (before.per_image[k] - before.avg_ratio);
        worst = std::max(worst, std::abs(after.per_image[k] - want));
        if (alpha == 1.0) {
          worst_equal = std::max(worst_equal, std::abs(after.per_image[k] - after.per_image[0]));
        }
      }
      ++per_alpha[alpha];
      ++checked;
    }
  }
  RebalanceConfig zero;
  zero.alpha = 0.0;
  for (const auto& c : rows) {
    if (core::rebalance_row(c.row, map_of(c), zero).weights != c.row) ++identity_breaks;
  }
  const bool enough = per_alpha[0.25] > 0 && per_alpha[0.5] > 0 && per_alpha[1.0] > 0;
  return {enough && worst <= kContractionTol && worst_equal <= kContractionTol && identity_breaks == 0,
          std::to_string(checked) + " unclamped eligible rows (" + std::to_string(per_alpha[0.25]) +
              "/" + std::to_string(per_alpha[0.5]) + "/" + std::to_string(per_alpha[1.0]) +
              "), max contraction error " + fmt("%.3g", worst) + ", max spread at alpha 1 " +
              fmt("%.3g", worst_equal) + " <= 1e-12, alpha 0 bit-exact breaks " +
              std::to_string(identity_breaks)};
}

Outcome eligibility() {
  const auto m = SegmentMap::contiguous(2, 1, 1);
  const RebalanceConfig cfg;  // tau 0.2
  struct Case {
    std::vector<double> row;
    bool expect_eligible;
    const char* name;
  };
  const double up = std::nextafter(0.2, 1.0);
  std::vector<Case> cases{
      {{0.1, 0.1, 0.8}, false, "exactly 0.2"},
      {{0.15, 0.0, 0.85}, false, "0.15"},
      {{0.0, 0.0, 1.0}, false, "no visual mass"},
      {{0.19, 0.01, 0.8}, false, "0.19 + 0.01"},
      {{up, 0.0, 1.0 - up}, true, "one ulp above 0.2"},
      {{0.2, 0.05, 0.75}, true, "0.25"},
  };
  std::size_t wrong = 0;
  std::string notes;
  for (const auto& c : cases) {
    const double mass = core::segment_ratios(c.row, m).total_visual;
    const auto out = core::rebalance_row(c.row, m, cfg);
    const bool unchanged = out.weights == c.row;
    const bool ok = out.eligible == c.expect_eligible && unchanged == !c.expect_eligible;
    if (!ok) {
      ++wrong;
      notes += std::string(" [") + c.name + " mass " + fmt("%.17g", mass) + "]";
    }
  }
  // The boundary row must really carry a visual mass of exactly 0.2.
  const bool boundary_exact = core::segment_ratios(cases[0].row, m).total_visual == 0.2;

  // Random rows scaled below the threshold come back untouched.
  Rng rng(derive_seed(kCorpusSeed, "eligibility"));
  std::size_t touched = 0, tried = 0;
  for (int i = 0; i < 500; ++i) {
    auto c = testing::random_row_case(rng, 32, 5);
    const auto seg = map_of(c);
    const double vis = core::segment_ratios(c.row, seg).total_visual;
    double text = 0.0;
    for (std::size_t j = c.spans.text.first; j < c.spans.text.second; ++j) text += c.row[j];
    if (vis <= 0.0 || text <= 0.0) continue;
    const double target = 0.2 * rng.uniform01();
    const double scale = target / vis;
    const double text_scale = (1.0 - target) / text;
    for (std::size_t j = 0; j < c.row.size(); ++j) {
      c.row[j] *= j < c.spans.text.first ? scale : text_scale;
    }
    if (core::segment_ratios(c.row, seg).total_visual > 0.2) continue;
    ++tried;
    const auto out = core::rebalance_row(c.row, seg, cfg);
    if (out.eligible || out.weights != c.row) ++touched;
  }
  return {wrong == 0 && boundary_exact && tried > 0 && touched == 0,
          std::to_string(cases.size()) + " boundary cases (incl. exactly 0.2: " +
              (boundary_exact ? "exact" : "NOT exact") + "), wrong " + std::to_string(wrong) + notes +
              "; " + std::to_string(tried) + " random sub-threshold rows, touched " + std::to_string(touched)};
}

Outcome worked_examples() {
  const auto m = SegmentMap::contiguous(2, 2, 1);
  RebalanceConfig half;
  half.alpha = 0.5;
  RebalanceConfig full;
  full.alpha = 1.0;
  const auto a = core::rebalance_row(std::vector<double>{0.10, 0.10, 0.30, 0.30, 0.20}, m, half);
  const auto b = core::rebalance_row(std::vector<double>{0.02, 0.00, 0.70, 0.08, 0.20}, m, full);
  const double da = max_abs_diff(a.weights, {0.15, 0.15, 0.25, 0.25, 0.20});
  const double db = max_abs_diff(b.weights, {0.21, 0.19, 0.40, 0.00, 0.20});
  return {da <= kExampleTol && db <= kExampleTol && b.clamp_events > 0,
          "balanced case max |diff| " + fmt("%.3g", da) + ", clamp case max |diff| " + fmt("%.3g", db) +
              " (" + std::to_string(b.clamp_events) + " clamp events), tolerance 1e-12"};
}

std::size_t count_gold(const std::vector<bench::QAInstance>& set, bool gold) {
  return static_cast<std::size_t>(
      std::count_if(set.begin(), set.end(), [&](const auto& q) { return q.gold == gold; }));
}

Outcome dataset_composition() {
  testing::TempDir dir("acceptance-gen");
  harness::CommonSettings common;
  common.seed = kRunSeed;
  harness::GenDataSettings gen;
  gen.pool.synthetic = true;
  gen.out = dir.path().string();
  std::ostringstream log;
  harness::run_gen_data(common, gen, log);

  const auto ex = bench::read_dataset(dir / "existence.jsonl");
  const auto co = bench::read_dataset(dir / "count.jsonl");
  const auto id = bench::read_dataset(dir / "identity.jsonl");
  bool balanced = count_gold(co, true) == 400 && count_gold(co, false) == 400 &&
                  count_gold(id, true) == 400 && count_gold(id, false) == 400;
  std::map<bench::Subtype, std::pair<std::size_t, std::size_t>> subtypes;
  for (const auto& q : ex) (q.gold ? subtypes[*q.subtype].first : subtypes[*q.subtype].second)++;
  for (auto st : {bench::Subtype::random, bench::Subtype::popular, bench::Subtype::adversarial}) {
    balanced = balanced && subtypes[st] == std::pair<std::size_t, std::size_t>{400, 400};
  }
  std::size_t both_absent = 0, one_absent = 0;
  for (const auto& q : co) {
    const auto kind = bench::classify_count_pair(q.counts.at(0), q.counts.at(1));
    if (kind == bench::CountPairKind::both_absent && q.gold) ++both_absent;
    if (kind == bench::CountPairKind::one_absent && !q.gold) ++one_absent;
  }
  std::size_t mismatches = 0;
  for (const auto* set : {&ex, &co, &id}) {
    for (const auto& q : *set) {
      if (bench::rederive_gold(q) != q.gold) ++mismatches;
    }
  }
  const std::size_t total = ex.size() + co.size() + id.size();
  return {ex.size() == 2400 && co.size() == 800 && id.size() == 800 && total == 4000 && balanced &&
              both_absent == 200 && one_absent == 200 && mismatches == 0,
          std::to_string(ex.size()) + " existence + " + std::to_string(co.size()) + " count + " +
              std::to_string(id.size()) + " identity = " + std::to_string(total) +
              ", every set 50/50: " + (balanced ? "yes" : "no") + ", count double-absent positives " +
              std::to_string(both_absent) + ", single-absent negatives " + std::to_string(one_absent) +
              ", gold re-derivation mismatches " + std::to_string(mismatches)};
}

// Confusion counts recomputed from scratch; fractions, zero when undefined.
std::vector<double> brute_force_metrics(const std::vector<std::string>& said,
                                        const std::vector<bool>& gold) {
  double tp = 0, fp = 0, tn = 0, fn = 0, yes = 0;
  for (std::size_t i = 0; i < said.size(); ++i) {
    const bool y = said[i] == "yes", n = said[i] == "no";
    if (y) ++yes;
    if (gold[i]) {
      (y ? tp : fn) += 1;
    } else if (y) {
      fp += 1;
    } else if (n) {
      tn += 1;
    }
  }
  const double total = static_cast<double>(said.size());
  const double acc = total > 0 ? (tp + tn) / total : 0;
  const double prec = tp + fp > 0 ? tp / (tp + fp) : 0;
  const double rec = tp + fn > 0 ? tp / (tp + fn) : 0;
  const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
  return {acc, prec, rec, f1, total > 0 ? yes / total : 0};
}

Outcome metrics_oracle() {
  Rng rng(derive_seed(kCorpusSeed, "metrics"));
  std::size_t mismatched = 0;
  const char* texts[] = {"Yes, it does.", "no", "NO.", "yes", "I cannot tell."};
  const char* parsed[] = {"yes", "no", "no", "yes", "unparseable"};
  for (int set = 0; set < 100; ++set) {
    const std::size_t n = 1 + rng.uniform_index(200);
    std::vector<bench::PredictionRecord> preds;
    std::vector<std::string> said;
    std::vector<bool> gold;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = rng.uniform_index(set % 10 == 0 ? 5 : 4);
      preds.push_back(bench::make_prediction("p" + std::to_string(i), texts[pick]));
      said.push_back(parsed[pick]);
      gold.push_back(rng.uniform01() < 0.5);
    }
    const auto r = bench::compute_metrics(preds, gold);
    const std::vector<double> got{r.accuracy, r.precision, r.recall, r.f1, r.yes_ratio};
    if (got != brute_force_metrics(said, gold)) ++mismatched;
  }
  std::vector<bench::PredictionRecord> hand;
  for (const char* s : {"Yes", "No", "No", "Yes"}) hand.push_back(bench::make_prediction("h", s));
  const auto h = bench::to_json(bench::compute_metrics(hand, std::vector<bool>{true, true, false, false}));
  bool hand_ok = true;
  std::string hand_vals;
  for (const char* k : {"accuracy", "precision", "recall", "f1", "yes_ratio"}) {
    hand_ok = hand_ok && h[k].get<double>() == 50.0;
    hand_vals += (hand_vals.empty() ? "" : "/") + fmt("%.2f", h[k].get<double>());
  }
  return {mismatched == 0 && hand_ok, "100 seeded sets, exact mismatches " + std::to_string(mismatched) +
                                          "; hand case acc/prec/rec/f1/yes = " + hand_vals};
}

struct SimSetup {
  bench::SyntheticPool pool;
  sim::DecoderConfig decoder;
  sim::ReadoutModel readout;
};

SimSetup sim_setup(double skew) {
  SimSetup s{bench::make_synthetic_pool(derive_seed(kRunSeed, "pool")), {}, {}};
  s.decoder.seed = derive_seed(kRunSeed, "decoder");
  s.decoder.skew = skew;
  s.readout.curve = sim::CurveKind::step;
  return s;
}

Outcome simulator_direction() {
  const auto t0 = Clock::now();
  const auto s = sim_setup(4.0);
  const auto set = bench::build_existence_set(s.pool.annotations, bench::Subtype::random, 800,
                                              derive_seed(kRunSeed, "existence"));
  RebalanceConfig half, full;
  half.alpha = 0.5;
  full.alpha = 1.0;
  const auto base = sim::simulate_suite(set, s.decoder, s.readout, std::nullopt, 0);
  const auto bal = sim::simulate_suite(set, s.decoder, s.readout, half, 0);
  const auto one = sim::simulate_suite(set, s.decoder, s.readout, full, 0);
  const double acc0 = bench::evaluate(set, base).accuracy;
  const double acc5 = bench::evaluate(set, bal).accuracy;
  const auto miss0 = sim::hallucinated_misses(set, base);
  const auto miss1 = sim::hallucinated_misses(set, one);
  const double secs = seconds_since(t0);
  return {set.size() == 800 && acc5 >= acc0 && miss1 < miss0 && secs < kSimSeconds,
          std::to_string(set.size()) + " instances, skew 4, step readout: accuracy " +
              fmt("%.2f", 100 * acc0) + " -> " + fmt("%.2f", 100 * acc5) +
              " at alpha 0.5; hallucinated misses " + std::to_string(miss0) + " -> " +
              std::to_string(miss1) + " at alpha 1; " + fmt("%.1f", secs) + " s < 60 s"};
}

Outcome sweep_shape() {
  const auto s = sim_setup(0.0);
  const auto sets = bench::sweep_image_count(s.pool.annotations, bench::kDefaultSweepLengths, 400,
                                             derive_seed(kRunSeed, "sweep/image-count"));
  std::map<std::size_t, double> acc;
  std::string curve;
  for (const auto& [len, set] : sets) {
    acc[len] = bench::evaluate(set, sim::simulate_suite(set, s.decoder, s.readout, std::nullopt, 0))
                   .accuracy;
    curve += (curve.empty() ? "" : ", ") + std::to_string(len) + ": " + fmt("%.2f", 100 * acc[len]);
  }
  return {acc.count(2) && acc.count(6) && acc[6] <= acc[2],
          "baseline accuracy by sequence length (400 per point) " + curve};
}

Outcome determinism() {
  testing::TempDir a("acceptance-det-a"), b("acceptance-det-b");
  auto pipeline = [](const testing::TempDir& d) {
    harness::CommonSettings common;
    common.seed = 42;
    harness::GenDataSettings gen;
    gen.pool.synthetic = true;
    gen.existence_per_subtype = 100;
    gen.count_total = 100;
    gen.identity_total = 100;
    gen.out = (d.path() / "data").string();
    std::ostringstream log;
    harness::run_gen_data(common, gen, log);
    harness::RunSimSettings run;
    run.dataset = (d.path() / "data" / "existence.jsonl").string();
    run.out = (d.path() / "sim").string();
    run.sim.dab = true;
    run.sim.skew = 4.0;
    run.dump_attention = 3;
    harness::run_run_sim(common, run, log);
  };
  pipeline(a);
  pipeline(b);
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.path());
    const auto other = b.path() / rel;
    ++compared;
    if (rel.filename() == "manifest.json") {
      // Input paths differ between the two run directories; hashes must not.
      auto ja = Json::parse(read_file(entry.path()));
      auto jb = Json::parse(read_file(other));
      if (ja["manifest"] != jb["manifest"] || ja["outputs"] != jb["outputs"]) ++differing;
    } else if (!fs::exists(other) || sha256_file(entry.path()) != sha256_file(other)) {
      ++differing;
    }
  }
  return {compared > 8 && differing == 0,
          std::to_string(compared) + " files from two gen-data + run-sim runs (seed 42), differing " +
              std::to_string(differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"kernel-oracle-equivalence", kernel_oracle},
      {"conservation", conservation},
      {"contraction-law", contraction},
      {"eligibility-threshold", eligibility},
      {"worked-examples", worked_examples},
      {"dataset-composition", dataset_composition},
      {"metrics-oracle", metrics_oracle},
      {"simulator-direction", simulator_direction},
      {"sweep-shape", sweep_shape},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
