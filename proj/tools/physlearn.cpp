// physlearn run --config <path> [--threads N]
// physlearn validate --config <path>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "physlearn/config.hpp"
#include "physlearn/experiment.hpp"

namespace {

using namespace physlearn;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void report(const ConfigError& e) {
  for (const auto& v : e.violations()) std::cerr << "config error: " << v << '\n';
}

// Best effort: a config that fails validation still gets a manifest when an
// output directory can be made out.
void record_config_failure(const std::string& raw, const ConfigError& e) {
  std::filesystem::path dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') dir = env;
  if (dir.empty()) {
    try {
      for (const auto& [k, v] : parse_key_values(raw))
        if (k == "output") dir = v;
    } catch (const ConfigError&) {
      return;
    }
  }
  if (dir.empty()) return;
  RunManifest m;
  m.status = "config_error";
  m.version = version_tag();
  m.output_dir = dir;
  for (const auto& v : e.violations()) m.error += (m.error.empty() ? "" : "; ") + v;
  try {
    write_manifest(m);
  } catch (const std::exception&) {
  }
}

int run_command(const std::string& path, unsigned threads) {
  std::string raw;
  try {
    raw = read_file(path);
    const auto cfg = validate_config(raw);
    const auto manifest = run_experiment(cfg, threads);
    if (manifest.exit_code() != exit_ok) {
      std::cerr << "run failed: " << manifest.error << '\n';
    } else {
      std::cout << manifest.kind << ": wrote " << manifest.files.size() << " files to "
                << manifest.output_dir.string() << '\n'
                << manifest.summary.dump(2) << '\n';
    }
    return manifest.exit_code();
  } catch (const ConfigError& e) {
    report(e);
    record_config_failure(raw, e);
    return exit_config_error;
  }
}

int validate_command(const std::string& path) {
  try {
    const auto cfg = validate_config(read_file(path));
    std::cout << render_config(cfg);
    return exit_ok;
  } catch (const ConfigError& e) {
    report(e);
    return exit_config_error;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch runner for the physical-learning experiments"};
  app.set_version_flag("--version", std::string(physlearn::version_tag()));
  app.require_subcommand(1);

  std::string config_path;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSVs and manifest.json");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config and print its canonical form");
  validate->add_option("--config", config_path, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : physlearn::exit_config_error;
  }
  try {
    if (*run) return run_command(config_path, threads);
    return validate_command(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return physlearn::exit_runtime_error;
  }
}
