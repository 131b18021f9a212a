// SPDX-License-Identifier: Apache-2.0
#include "dab/harness/options.hpp"

#include <cctype>
#include <charconv>

#include "dab/util/errors.hpp"
#include "dab/util/digest.hpp"
#include "dab/util/jsonl.hpp"
#include "dab/util/rng.hpp"

namespace dab::harness {

std::string env_name(const std::string& flag) {
  std::string out = kEnvPrefix;
  for (char c : flag) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

CLI::Option* LayeredOptions::flag(const std::string& flag, bool& field, const std::string& help) {
  auto* opt = app_->add_flag("--" + flag, field, help)->envname(env_name(flag));
  fallbacks_.emplace_back(opt, [&field, flag](const Json& cfg) { field = cfg.at(flag).get<bool>(); });
  return opt;
}

void LayeredOptions::apply(const Json& config) const {
  for (const auto& [opt, fill] : fallbacks_) {
    if (opt->count() > 0) continue;
    const auto key = opt->get_name(false, true).substr(2);
    if (!config.contains(key)) continue;
    try {
      fill(config);
    } catch (const Json::exception&) {
      throw ConfigError("config value for '" + key + "' has the wrong type");
    }
  }
}

Json config_for(const Json& file, const std::string& command) {
  if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
  Json merged = Json::object();
  for (const auto& [k, v] : file.items()) {
    if (!v.is_object()) merged[k] = v;
  }
  if (file.contains(command)) {
    for (const auto& [k, v] : file[command].items()) merged[k] = v;
  }
  return merged;
}

sim::DecoderConfig SimSettings::decoder(std::uint64_t seed) const {
  sim::DecoderConfig c;
  if (!decoder_config.empty()) {
    Json j;
    try {
      j = Json::parse(read_file(decoder_config));
    } catch (const Json::exception& e) {
      throw ConfigError(decoder_config + ": " + e.what());
    }
    c = sim::decoder_config_from_json(j);
  }
  if (skew) c.skew = *skew;
  if (skew_target == "random") {
    c.skew_target.reset();
  } else if (!skew_target.empty()) {
    std::size_t v = 0;
    const auto res = std::from_chars(skew_target.data(), skew_target.data() + skew_target.size(), v);
    if (res.ec != std::errc() || res.ptr != skew_target.data() + skew_target.size()) {
      throw ConfigError("--skew-target must be 'random' or an image index, got '" + skew_target + "'");
    }
    c.skew_target = v;
  }
  c.seed = derive_seed(seed, "decoder");
  c.validate();
  return c;
}

sim::ReadoutModel SimSettings::readout() const {
  sim::ReadoutModel r;
  r.curve = sim::parse_curve_kind(curve);
  r.threshold = curve_threshold;
  r.layers = sim::parse_readout_layers(readout_layers);
  r.validate();
  return r;
}

core::RebalanceConfig SimSettings::rebalance() const {
  core::RebalanceConfig r;
  r.alpha = alpha;
  r.tau = tau;
  r.clamp_mode = core::parse_clamp_mode(clamp_mode);
  r.scope = core::parse_scope(scope);
  r.validate();
  return r;
}

Json SimSettings::to_json(std::uint64_t seed) const {
  const auto r = rebalance();
  const auto ro = readout();
  return Json{{"decoder", sim::to_json(decoder(seed))},
              {"readout", sim::to_json(ro)},
              {"dab", dab},
              {"alpha", r.alpha},
              {"tau", r.tau},
              {"clamp_mode", core::to_string(r.clamp_mode)},
              {"scope", core::to_string(r.scope)}};
}

std::vector<std::size_t> parse_point_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.pop_back();
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.erase(0, 1);
    std::size_t v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ConfigError("bad sweep point '" + item + "' in '" + text + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

}  // namespace dab::harness
