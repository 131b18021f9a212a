// SPDX-License-Identifier: Apache-2.0
#include "dab/harness/manifest.hpp"

#include "dab/util/digest.hpp"
#include "dab/version.hpp"

namespace dab::harness {

void RunManifest::add_input(std::string role, const std::filesystem::path& path) {
  inputs.push_back({std::move(role), path.string(), sha256_file(path)});
}

void RunManifest::add_input_bytes(std::string role, std::string_view bytes) {
  inputs.push_back({std::move(role), "", sha256_hex(bytes)});
}

std::string RunManifest::hash() const {
  Json ins = Json::array();
  for (const auto& i : inputs) ins.push_back({{"role", i.role}, {"sha256", i.sha256}});
  const Json basis{{"tool", "dab-harness"},
                   {"version", kVersion},
                   {"command", command},
                   {"config", config},
                   {"inputs", ins}};
  return sha256_hex(basis.dump());
}

Json RunManifest::to_json() const {
  Json ins = Json::array();
  for (const auto& i : inputs) {
    Json j{{"role", i.role}, {"sha256", i.sha256}};
    if (!i.path.empty()) j["path"] = i.path;
    ins.push_back(std::move(j));
  }
  return Json{{"manifest", hash()},
              {"tool", "dab-harness"},
              {"version", kVersion},
              {"command", command},
              {"config", config},
              {"inputs", ins}};
}

void write_output(RunManifest& manifest, const std::filesystem::path& dir, const std::string& name,
                  std::string_view contents) {
  write_file(dir / name, contents);
  manifest.outputs.push_back(name);
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  auto j = manifest.to_json();
  Json outs = Json::array();
  for (const auto& name : manifest.outputs) {
    outs.push_back({{"file", name}, {"sha256", sha256_file(dir / name)}});
  }
  j["outputs"] = outs;
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace dab::harness
