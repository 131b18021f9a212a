// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dab/core/rebalance.hpp"
#include "dab/sim/decoder.hpp"
#include "dab/sim/readout.hpp"
#include "dab/util/jsonl.hpp"

namespace dab::harness {

/// Prefix of the environment variable mirroring each flag: --clamp-mode
/// reads DAB_CLAMP_MODE.
inline constexpr const char* kEnvPrefix = "DAB_";

std::string env_name(const std::string& flag);

/// Registers options whose value comes from, in order: the command line,
/// the DAB_* environment variable, the JSON config file, the default.
///
/// Config files hold flag names as keys. Top-level keys apply to every
/// command; an object keyed by the command name overrides them:
///   {"seed": 7, "run-sim": {"alpha": 1.0, "dab": true}}
class LayeredOptions {
  template <typename T>
  struct is_optional : std::false_type {};
  template <typename T>
  struct is_optional<std::optional<T>> : std::true_type {};

 public:
  explicit LayeredOptions(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& flag, T& field, const std::string& help) {
    auto* opt = app_->add_option("--" + flag, field, help)->envname(env_name(flag));
    if constexpr (is_optional<T>::value) {
      fallbacks_.emplace_back(opt, [&field, flag](const Json& cfg) {
        field = cfg.at(flag).get<typename T::value_type>();
      });
    } else {
      if constexpr (!std::is_same_v<T, std::vector<std::string>>) opt->capture_default_str();
      fallbacks_.emplace_back(opt, [&field, flag](const Json& cfg) { field = cfg.at(flag).get<T>(); });
    }
    return opt;
  }

  CLI::Option* flag(const std::string& flag, bool& field, const std::string& help);

  /// Fills every option the command line and environment left unset.
  /// Throws ConfigError on a value of the wrong type.
  void apply(const Json& config) const;

 private:
  CLI::App* app_;
  std::vector<std::pair<CLI::Option*, std::function<void(const Json&)>>> fallbacks_;
};

/// Merged view of a config file for one command.
Json config_for(const Json& file, const std::string& command);

struct CommonSettings {
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string config;
};

struct PoolSettings {
  std::string annotations;
  std::string view_groups;
  std::string similarity;
  bool synthetic = false;
};

struct GenDataSettings {
  PoolSettings pool;
  std::string out;
  std::size_t existence_per_subtype = 800;
  std::size_t count_total = 800;
  std::size_t identity_total = 800;
  std::size_t existence_images = 3;
  std::size_t identity_images = 4;
};

struct SimSettings {
  std::string decoder_config;
  std::optional<double> skew;
  std::string skew_target;  // "", "random" or an image index
  std::string curve = "step";
  double curve_threshold = 0.5;
  std::string readout_layers = "final";
  bool dab = false;
  double alpha = 0.5;
  double tau = 0.2;
  std::string clamp_mode = "clamp-redistribute";
  std::string scope = "per-row";

  /// Decoder from the config file (if any) with flag overrides applied;
  /// its seed is always split from the run seed.
  sim::DecoderConfig decoder(std::uint64_t seed) const;
  sim::ReadoutModel readout() const;
  core::RebalanceConfig rebalance() const;
  Json to_json(std::uint64_t seed) const;
};

struct RunSimSettings {
  std::string dataset;
  std::string out;
  SimSettings sim;
  std::size_t dump_attention = 0;
};

struct EvalSettings {
  std::vector<std::string> datasets;
  std::string predictions;
  std::string out;
};

struct SweepSettings {
  std::string kind;
  std::string points = "default";  // comma list; empty string for none
  std::size_t per_point = 800;
  std::size_t seq_len = 4;
  PoolSettings pool;
  std::string predictions_dir;
  bool simulate = true;
  SimSettings sim;
  std::string out;
};

struct ReportSettings {
  std::vector<std::string> eval_reports;
  std::string hallucination_pairs;
  std::string out;
};

/// "2,3,4" -> {2, 3, 4}; "" -> {}. Throws ConfigError on junk.
std::vector<std::size_t> parse_point_list(const std::string& text);

}  // namespace dab::harness
