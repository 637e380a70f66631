#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "physlearn/config.hpp"

namespace physlearn {

inline constexpr const char* kOutputDirEnv = "PHYSLEARN_OUTPUT_DIR";

enum ExitCode : int { exit_ok = 0, exit_config_error = 1, exit_runtime_error = 2 };

struct RunManifest {
  std::string status = "ok";  // ok | config_error | failed
  std::string error;
  std::string version;
  std::string kind;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string config;  // canonical text of the validated config
  double wall_seconds = 0.0;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir, manifest excluded
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  int exit_code() const;
  nlohmann::ordered_json to_json() const;
};

const char* version_tag();

// Output directory after applying the environment override.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

// Runs the experiment and writes its CSVs plus manifest.json. Module failures
// are caught and recorded; the manifest is written either way.
// threads_override > 0 replaces cfg.threads.
RunManifest run_experiment(const ExperimentConfig& cfg, unsigned threads_override = 0);

// Writes manifest.json into manifest.output_dir.
void write_manifest(const RunManifest& manifest);

}  // namespace physlearn
