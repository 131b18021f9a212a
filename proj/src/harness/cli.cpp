// SPDX-License-Identifier: Apache-2.0
#include "dab/harness/cli.hpp"

#include "CLI11.hpp"
#include "dab/harness/commands.hpp"
#include "dab/util/digest.hpp"
#include "dab/util/errors.hpp"
#include "dab/version.hpp"

namespace dab::harness {

namespace {

void add_pool(LayeredOptions& opts, PoolSettings& pool) {
  opts.option("annotations", pool.annotations, "Annotation JSON Lines file");
  opts.option("view-groups", pool.view_groups, "View group JSON Lines file");
  opts.option("similarity", pool.similarity, "Image similarity CSV");
  opts.flag("synthetic", pool.synthetic, "Use the built-in synthetic pool instead of input files");
}

void add_sim(LayeredOptions& opts, SimSettings& sim) {
  opts.option("decoder-config", sim.decoder_config, "Decoder config JSON file");
  opts.option("skew", sim.skew, "Logit bias toward one image (overrides the decoder config)");
  opts.option("skew-target", sim.skew_target, "Skewed image: 'random' or a 0-based index");
  opts.option("curve", sim.curve, "Detection curve: step, saturated, linear, logistic");
  opts.option("curve-threshold", sim.curve_threshold, "Curve threshold in (0, 1)");
  opts.option("readout-layers", sim.readout_layers, "Rows read out: final or all");
  opts.flag("dab", sim.dab, "Also run with attention balancing");
  opts.option("alpha", sim.alpha, "Balancing coefficient in [0, 1]");
  opts.option("tau", sim.tau, "Visual-mass threshold in [0, 1]");
  opts.option("clamp-mode", sim.clamp_mode, "clamp-redistribute or clamp-renormalize");
  opts.option("scope", sim.scope, "per-row or aggregated");
}

void emit_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention balancing experiments: datasets, simulation, scoring, sweeps", "dab-harness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonSettings common;
  GenDataSettings gen;
  RunSimSettings runsim;
  EvalSettings eval;
  SweepSettings sweep;
  ReportSettings report;

  std::vector<std::pair<CLI::App*, LayeredOptions>> layers;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    layers.emplace_back(s, LayeredOptions(s));
    auto& opts = layers.back().second;
    opts.option("seed", common.seed, "Root seed for every random choice");
    opts.option("workers", common.workers, "Worker threads (0 = all cores)");
    s->add_option("--config", common.config, "JSON config file")->envname(env_name("config"));
    return std::pair<CLI::App*, LayeredOptions*>{s, &opts};
  };
  layers.reserve(5);

  {
    auto [s, o] = sub("gen-data", "Build existence, count and identity datasets");
    add_pool(*o, gen.pool);
    o->option("out", gen.out, "Output directory");
    o->option("existence-per-subtype", gen.existence_per_subtype, "Existence questions per subtype");
    o->option("count-total", gen.count_total, "Count questions");
    o->option("identity-total", gen.identity_total, "Identity questions");
    o->option("existence-images", gen.existence_images, "Images per existence question");
    o->option("identity-images", gen.identity_images, "Images per identity question");
  }
  {
    auto [s, o] = sub("run-sim", "Answer an existence dataset with the toy decoder");
    o->option("dataset", runsim.dataset, "Existence dataset (JSON Lines)");
    o->option("out", runsim.out, "Output directory");
    o->option("dump-attention", runsim.dump_attention, "Write attention of the first N instances");
    add_sim(*o, runsim.sim);
  }
  {
    auto [s, o] = sub("eval", "Score predictions against datasets");
    o->option("dataset", eval.datasets, "Dataset file (repeatable)");
    o->option("predictions", eval.predictions, "Predictions (JSON Lines)");
    o->option("out", eval.out, "Output directory");
  }
  {
    auto [s, o] = sub("sweep", "Run an image-count, negative-position or negative-ratio sweep");
    o->option("kind", sweep.kind, "image-count, negative-position or negative-ratio");
    o->option("points", sweep.points, "Comma-separated sweep points, 'default', or empty");
    o->option("per-point", sweep.per_point, "Questions per sweep point");
    o->option("seq-len", sweep.seq_len, "Sequence length for negative-position");
    o->option("predictions-dir", sweep.predictions_dir,
              "Directory of predictions-<point>.jsonl files to score instead of simulating");
    o->flag("simulate", sweep.simulate, "Simulate image-count points (default on)");
    add_pool(*o, sweep.pool);
    add_sim(*o, sweep.sim);
    o->option("out", sweep.out, "Output directory");
  }
  {
    auto [s, o] = sub("report", "Collect eval reports into tables and analyse hallucination pairs");
    o->option("eval-report", report.eval_reports, "report.json from eval (repeatable)");
    o->option("hallucination-pairs", report.hallucination_pairs,
              "Per-image single/joint hallucination flags (JSON Lines)");
    o->option("out", report.out, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what(), kExitUsage);
    return kExitUsage;
  }

  try {
    for (auto& [s, opts] : layers) {
      if (!s->parsed()) continue;
      if (!common.config.empty()) {
        Json file;
        try {
          file = Json::parse(read_file(common.config));
        } catch (const Json::exception& e) {
          throw ConfigError(common.config + ": " + e.what());
        }
        opts.apply(config_for(file, s->get_name()));
      }
      const auto name = s->get_name();
      if (name == "gen-data") run_gen_data(common, gen, out);
      if (name == "run-sim") run_run_sim(common, runsim, out);
      if (name == "eval") run_eval(common, eval, out);
      if (name == "sweep") run_sweep(common, sweep, out);
      if (name == "report") run_report(common, report, out);
    }
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what(), kExitUsage);
    return kExitUsage;
  } catch (const InvariantError& e) {
    emit_error(err, "invariant", e.what(), kExitInvariant);
    return kExitInvariant;
  } catch (const Error& e) {
    // Data, dimension and domain errors all trace back to input files.
    emit_error(err, std::string(to_string(e.kind())).c_str(), e.what(), kExitData);
    return kExitData;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what(), kExitInvariant);
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace dab::harness
