#include "physlearn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "physlearn/csv.hpp"

namespace physlearn {

namespace {

enum class Type { real, integer, choice, path };
enum class Check { none, positive, nonnegative, probability, unit_interval_open_low, at_least_one, at_least_twenty, width };

struct KeySpec {
  std::string name;
  Type type;
  // Optional keys with an empty default stay absent unless given.
  bool required = false;
  std::string def;
  Check check = Check::none;
  std::vector<std::string> choices = {};
};

KeySpec req(std::string name, Type type, Check check = Check::none) {
  return {std::move(name), type, true, "", check};
}
KeySpec opt(std::string name, Type type, std::string def, Check check = Check::none) {
  return {std::move(name), type, false, std::move(def), check};
}
KeySpec one_of(std::string name, std::string def, std::vector<std::string> choices) {
  return {std::move(name), Type::choice, false, std::move(def), Check::none, std::move(choices)};
}

std::vector<KeySpec> network_ranges() {
  return {opt("c_min", Type::real, "0.1", Check::positive), opt("c_max", Type::real, "10", Check::positive),
          opt("l_min", Type::real, "0.1", Check::positive), opt("l_max", Type::real, "10", Check::positive),
          opt("r_min", Type::real, "0.01", Check::nonnegative), opt("r_max", Type::real, "1", Check::nonnegative)};
}

std::vector<KeySpec> schema(ExperimentKind kind) {
  using enum Type;
  std::vector<KeySpec> keys;
  switch (kind) {
    case ExperimentKind::parrot_train:
      keys = {req("dim", integer, Check::at_least_one),
              req("bottleneck", integer, Check::at_least_one),
              opt("samples", integer, "200", Check::at_least_one),
              opt("spectrum_decay", real, "0.5", Check::positive),
              opt("dataset", path, ""),
              one_of("mode", "closed_form", {"closed_form", "gradient"}),
              opt("step", real, "0", Check::nonnegative),
              opt("max_iterations", integer, "100000000", Check::at_least_one),
              opt("improvement_tol", real, "1e-16", Check::positive)};
      break;
    case ExperimentKind::collective:
      keys = {req("agents", integer, Check::at_least_one),
              opt("external_dim", integer, "1", Check::at_least_one),
              opt("code_dim", integer, "3", Check::at_least_one),
              opt("frames", integer, "1", Check::at_least_one),
              opt("rounds", integer, "1000", Check::nonnegative),
              opt("tol", real, "1e-8", Check::positive),
              opt("damping", real, "0.5", Check::unit_interval_open_low),
              opt("self_weight", real, "0.5", Check::probability),
              opt("decoder_scale", real, "1", Check::positive)};
      break;
    case ExperimentKind::digital_loop:
      keys = {req("words", integer, Check::nonnegative),
              opt("width", integer, "8", Check::width),
              opt("temperature", real, "300", Check::positive),
              one_of("model", "perfect", {"perfect", "zero", "random", "noisy"}),
              opt("flip_prob", real, "0", Check::probability)};
      break;
    case ExperimentKind::analog_sweep:
      keys = {opt("mass", real, "1", Check::positive),
              opt("stiffness", real, "1", Check::nonnegative),
              opt("friction", real, "0.5", Check::positive),
              opt("amplitude", real, "1"),
              req("omega_min", real, Check::positive),
              req("omega_max", real, Check::positive),
              req("points", integer, Check::at_least_one),
              opt("steps_per_period", integer, "1000", Check::at_least_twenty),
              opt("settle_damping_times", real, "20", Check::positive),
              opt("min_window_periods", integer, "4", Check::at_least_one),
              opt("trace_omega", real, "", Check::positive),
              opt("trace_duration", real, "", Check::positive),
              opt("dt", real, "", Check::positive)};
      break;
    case ExperimentKind::tune_oscillator:
      keys = {opt("mass", real, "1", Check::positive),
              opt("friction", real, "0.5", Check::positive),
              opt("amplitude", real, "1"),
              opt("omega", real, "1", Check::positive),
              opt("k_start", real, "4", Check::positive),
              opt("k_min", real, "0.25", Check::positive),
              opt("k_max", real, "4", Check::positive),
              opt("sigma0", real, "0.1", Check::positive),
              opt("beta", real, "0.5", Check::nonnegative),
              opt("window", real, "10", Check::at_least_one),
              opt("budget", integer, "2000", Check::nonnegative),
              one_of("plant", "simulated", {"simulated", "analytic"}),
              opt("steps_per_period", integer, "200", Check::at_least_twenty),
              opt("runs", integer, "1", Check::at_least_one)};
      break;
    case ExperimentKind::tune_network:
      keys = {req("nodes", integer, Check::at_least_one),
              opt("edge_prob", real, "0.5", Check::probability),
              opt("drive_node", integer, "0", Check::nonnegative),
              opt("amplitude", real, "1"),
              req("omega", real, Check::positive),
              opt("scale_min", real, "0.1", Check::positive),
              opt("scale_max", real, "10", Check::positive),
              opt("sigma0", real, "0.1", Check::positive),
              opt("beta", real, "1", Check::nonnegative),
              opt("window", real, "10", Check::at_least_one),
              opt("budget", integer, "500", Check::nonnegative)};
      for (auto& k : network_ranges()) keys.push_back(k);
      break;
    case ExperimentKind::resonet_spectrum:
      keys = {req("nodes", integer, Check::at_least_one),
              opt("edge_prob", real, "0.5", Check::probability),
              opt("drive_node", integer, "0", Check::nonnegative),
              opt("amplitude", real, "1"),
              opt("sweep_points", integer, "0", Check::nonnegative),
              opt("omega_min", real, "", Check::positive),
              opt("omega_max", real, "", Check::positive),
              opt("steps_per_period", integer, "40", Check::at_least_twenty),
              opt("settle_damping_times", real, "10", Check::positive),
              opt("max_settle_time", real, "1000", Check::positive),
              opt("min_window_periods", integer, "8", Check::at_least_one)};
      for (auto& k : network_ranges()) keys.push_back(k);
      break;
    case ExperimentKind::resonet_scaling:
      keys = {opt("v_min", integer, "10", Check::at_least_one),
              opt("v_max", integer, "60", Check::at_least_one),
              opt("v_step", integer, "5", Check::at_least_one),
              opt("edge_prob", real, "0.9", Check::probability)};
      break;
  }
  return keys;
}

std::string check_message(const std::string& key, Check c) {
  switch (c) {
    case Check::positive: return key + " must be positive";
    case Check::nonnegative: return key + " must be nonnegative";
    case Check::probability: return key + " must be in [0, 1]";
    case Check::unit_interval_open_low: return key + " must be in (0, 1]";
    case Check::at_least_one: return key + " must be at least 1";
    case Check::at_least_twenty: return key + " must be at least 20";
    case Check::width: return key + " must be in [1, 64]";
    case Check::none: break;
  }
  return key + " is invalid";
}

bool passes(double v, Check c) {
  switch (c) {
    case Check::none: return std::isfinite(v);
    case Check::positive: return v > 0.0 && std::isfinite(v);
    case Check::nonnegative: return v >= 0.0 && std::isfinite(v);
    case Check::probability: return v >= 0.0 && v <= 1.0;
    case Check::unit_interval_open_low: return v > 0.0 && v <= 1.0;
    case Check::at_least_one: return v >= 1.0 && std::isfinite(v);
    case Check::at_least_twenty: return v >= 20.0 && std::isfinite(v);
    case Check::width: return v >= 1.0 && v <= 64.0;
  }
  return false;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Parses and range-checks one value; returns an error message or "".
std::string check_value(const KeySpec& spec, const std::string& value) {
  switch (spec.type) {
    case Type::path:
      return "";
    case Type::choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        return spec.name + " must be one of: " + join(spec.choices) + " (got '" + value + "')";
      }
      return "";
    case Type::integer: {
      long long v = 0;
      try {
        v = csv::parse_int(value, spec.name);
      } catch (const InputError&) {
        return spec.name + " must be an integer (got '" + value + "')";
      }
      return passes(static_cast<double>(v), spec.check) ? "" : check_message(spec.name, spec.check);
    }
    case Type::real: {
      double v = 0.0;
      try {
        v = csv::parse_double(value, spec.name);
      } catch (const InputError&) {
        return spec.name + " must be a number (got '" + value + "')";
      }
      return passes(v, spec.check) ? "" : check_message(spec.name, spec.check);
    }
  }
  return "";
}

void cross_checks(const ExperimentConfig& c, std::vector<std::string>& errors) {
  auto both = [&](const char* a, const char* b) { return c.has(a) && c.has(b); };
  switch (c.kind) {
    case ExperimentKind::parrot_train:
      if (c.text("dataset").empty() && c.integer("bottleneck") > c.integer("dim")) {
        errors.push_back("bottleneck must not exceed dim");
      }
      break;
    case ExperimentKind::analog_sweep:
      if (c.real("omega_max") < c.real("omega_min")) errors.push_back("omega_max must be at least omega_min");
      if (c.integer("points") > 1 && c.real("omega_max") == c.real("omega_min")) {
        errors.push_back("omega_max must exceed omega_min when points > 1");
      }
      break;
    case ExperimentKind::tune_oscillator:
      if (!(c.real("k_min") <= c.real("k_start") && c.real("k_start") <= c.real("k_max"))) {
        errors.push_back("k_start must lie in [k_min, k_max]");
      }
      break;
    case ExperimentKind::tune_network:
      if (c.real("scale_min") > c.real("scale_max")) errors.push_back("scale_min must not exceed scale_max");
      [[fallthrough]];
    case ExperimentKind::resonet_spectrum:
      if (c.integer("drive_node") >= c.integer("nodes")) errors.push_back("drive_node must be less than nodes");
      if (c.real("c_min") > c.real("c_max")) errors.push_back("c_min must not exceed c_max");
      if (c.real("l_min") > c.real("l_max")) errors.push_back("l_min must not exceed l_max");
      if (c.real("r_min") > c.real("r_max")) errors.push_back("r_min must not exceed r_max");
      if (c.real("r_min") == 0.0 && c.real("r_max") > 0.0) {
        errors.push_back("r_min must be positive unless r_max is 0 (lossless)");
      }
      if (both("omega_min", "omega_max") && c.real("omega_min") >= c.real("omega_max")) {
        errors.push_back("omega_max must exceed omega_min");
      }
      break;
    case ExperimentKind::resonet_scaling:
      if (c.integer("v_min") >= c.integer("v_max")) errors.push_back("v_max must exceed v_min");
      break;
    case ExperimentKind::collective:
    case ExperimentKind::digital_loop:
      break;
  }
}

}  // namespace

const std::vector<std::string>& experiment_kind_names() {
  static const std::vector<std::string> names{"parrot_train",    "collective",   "digital_loop",
                                              "analog_sweep",    "tune_oscillator", "tune_network",
                                              "resonet_spectrum", "resonet_scaling"};
  return names;
}

std::string to_string(ExperimentKind kind) {
  return experiment_kind_names()[static_cast<std::size_t>(kind)];
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : InputError("invalid config: " + join(violations)), violations_(std::move(violations)) {}

double ExperimentConfig::real(const std::string& key) const {
  return csv::parse_double(text(key), key);
}

long long ExperimentConfig::integer(const std::string& key) const {
  return csv::parse_int(text(key), key);
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw InputError("config has no key '" + key + "'");
  return it->second;
}

bool ExperimentConfig::has(const std::string& key) const { return params.count(key) != 0; }

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view raw) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  bool section_seen = false;
  std::istringstream in{std::string(raw)};
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string where = "line " + std::to_string(number) + ": ";
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        break;
      }
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') errors.push_back(where + "unterminated section header");
      else if (section_seen) errors.push_back(where + "only one section is allowed per config");
      section_seen = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      errors.push_back(where + "empty key");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return out;
}

ExperimentConfig validate_config(std::string_view raw) {
  const auto pairs = parse_key_values(raw);
  std::map<std::string, std::string> given(pairs.begin(), pairs.end());
  std::vector<std::string> errors;
  ExperimentConfig cfg;

  const auto& names = experiment_kind_names();
  bool kind_ok = false;
  if (!given.count("kind")) {
    errors.push_back("missing required key 'kind'; valid kinds: " + join(names));
  } else {
    const auto it = std::find(names.begin(), names.end(), given["kind"]);
    if (it == names.end()) {
      errors.push_back("unknown kind '" + given["kind"] + "'; valid kinds: " + join(names));
    } else {
      cfg.kind = static_cast<ExperimentKind>(it - names.begin());
      kind_ok = true;
    }
  }

  if (!given.count("seed")) {
    errors.push_back("missing required key 'seed'");
  } else {
    const auto& s = given["seed"];
    try {
      const long long v = csv::parse_int(s, "seed");
      if (v < 0) throw InputError("negative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } catch (const InputError&) {
      errors.push_back("seed must be a nonnegative integer (got '" + s + "')");
    }
  }

  if (!given.count("output") || given["output"].empty()) {
    errors.push_back("missing required key 'output'");
  } else {
    cfg.output = given["output"];
  }

  if (given.count("threads")) {
    const auto msg = check_value(opt("threads", Type::integer, "1", Check::at_least_one), given["threads"]);
    if (msg.empty()) cfg.threads = static_cast<unsigned>(csv::parse_int(given["threads"], "threads"));
    else errors.push_back(msg);
  }

  if (kind_ok) {
    const auto keys = schema(cfg.kind);
    std::set<std::string> known{"kind", "seed", "output", "threads"};
    bool values_ok = true;
    for (const auto& spec : keys) {
      known.insert(spec.name);
      const auto it = given.find(spec.name);
      if (it == given.end()) {
        if (spec.required) {
          errors.push_back("missing required key '" + spec.name + "' for kind " + to_string(cfg.kind));
          values_ok = false;
        } else if (!spec.def.empty() || spec.type == Type::path) {
          cfg.params[spec.name] = spec.def;
        }
        continue;
      }
      const auto msg = check_value(spec, it->second);
      if (!msg.empty()) {
        errors.push_back(msg);
        values_ok = false;
      }
      cfg.params[spec.name] = it->second;
    }
    for (const auto& [key, value] : pairs) {
      if (!known.count(key)) errors.push_back("unknown key '" + key + "' for kind " + to_string(cfg.kind));
    }
    if (values_ok) cross_checks(cfg, errors);
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return validate_config(buf.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out = "kind = " + to_string(cfg.kind) + "\nseed = " + std::to_string(cfg.seed) +
                    "\noutput = " + cfg.output + "\nthreads = " + std::to_string(cfg.threads) + "\n";
  for (const auto& [k, v] : cfg.params) out += k + " = " + v + "\n";
  return out;
}

}  // namespace physlearn
