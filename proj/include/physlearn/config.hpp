#pragma once

// Flat key = value experiment configs. '#' and ';' start comments; a single
// optional [section] header line is accepted and ignored.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "physlearn/errors.hpp"

namespace physlearn {

enum class ExperimentKind {
  parrot_train,
  collective,
  digital_loop,
  analog_sweep,
  tune_oscillator,
  tune_network,
  resonet_spectrum,
  resonet_scaling,
};

const std::vector<std::string>& experiment_kind_names();
std::string to_string(ExperimentKind kind);

// Carries every violation found, one message per entry.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ExperimentConfig {
  ExperimentKind kind{};
  std::uint64_t seed = 0;
  std::string output;
  unsigned threads = 1;
  // Every key of the kind's schema, defaults filled in, as written text.
  std::map<std::string, std::string> params;

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool has(const std::string& key) const;
};

// Raw key/value pairs in file order; throws ConfigError on syntax problems.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view raw);

ExperimentConfig validate_config(std::string_view raw);

ExperimentConfig load_config(const std::string& path);

// Canonical text form: common keys first, then params sorted by key.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace physlearn
