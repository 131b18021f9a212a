// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dab/util/jsonl.hpp"

namespace dab::harness {

struct ManifestInput {
  std::string role;  // "annotations", "dataset", ...
  std::string path;
  std::string sha256;
};

/// What produced a set of output files.
///
/// The hash covers the tool version, command, configuration and the
/// content hashes of the inputs, but not any path, so the same run written
/// to two directories yields the same hash and the same bytes.
struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::vector<ManifestInput> inputs;
  std::vector<std::string> outputs;  // file names relative to the output directory

  /// Hashes the file and records it under `role`.
  void add_input(std::string role, const std::filesystem::path& path);
  /// For inputs generated in-process rather than read from disk.
  void add_input_bytes(std::string role, std::string_view bytes);

  std::string hash() const;
  Json to_json() const;
};

/// Writes `contents` to dir/name and records the name as an output.
void write_output(RunManifest& manifest, const std::filesystem::path& dir, const std::string& name,
                  std::string_view contents);
/// Writes dir/manifest.json with per-output content hashes.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace dab::harness
