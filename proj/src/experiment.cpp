#include "physlearn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>

#include "physlearn/analog.hpp"
#include "physlearn/autoencoder.hpp"
#include "physlearn/collective.hpp"
#include "physlearn/csv.hpp"
#include "physlearn/digital.hpp"
#include "physlearn/errors.hpp"
#include "physlearn/io.hpp"
#include "physlearn/parallel.hpp"
#include "physlearn/random.hpp"
#include "physlearn/resonet.hpp"
#include "physlearn/tuner.hpp"

#ifndef PHYSLEARN_VERSION
#define PHYSLEARN_VERSION "unknown"
#endif

namespace physlearn {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using csv::format_double;

namespace {

// Derived seeds keep independent random streams apart.
constexpr std::uint64_t kStreamStride = 0x9E3779B97F4A7C15ull;
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) { return seed + stream * kStreamStride; }

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  unsigned threads;
  RunManifest& manifest;

  void write(const std::string& name, const csv::Table& table) {
    csv::write(dir / name, table);
    manifest.files.push_back(name);
  }
  void note(const std::string& name) { manifest.files.push_back(name); }
  json& summary() { return manifest.summary; }
};

std::vector<double> linspace(double lo, double hi, long long n) {
  std::vector<double> out;
  for (long long i = 0; i < n; ++i) {
    out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

NetworkRanges ranges_from(const ExperimentConfig& c) {
  NetworkRanges r;
  r.capacitance = {c.real("c_min"), c.real("c_max")};
  r.inductance = {c.real("l_min"), c.real("l_max")};
  r.resistance = {c.real("r_min"), c.real("r_max")};
  return r;
}

csv::Table history_table(const TuneResult& r, std::size_t dims) {
  csv::Table t{{"step"}, {}};
  for (std::size_t d = 0; d < dims; ++d) t.header.push_back("theta_" + std::to_string(d));
  for (const char* h : {"power_W", "sigma_eff", "is_incumbent"}) t.header.push_back(h);
  for (const auto& rec : r.history) {
    csv::Row row{std::to_string(rec.step)};
    for (double x : rec.theta) row.push_back(format_double(x));
    row.push_back(format_double(rec.power));
    row.push_back(format_double(rec.sigma_eff));
    row.push_back(rec.is_incumbent ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Gaussian frames with standard deviations decay^i along a random basis.
Dataset synthetic_dataset(std::size_t dim, std::size_t samples, double decay, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = standard_normal(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  std::vector<Frame> frames;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std::pow(decay, static_cast<double>(i)) * standard_normal(rng);
    frames.emplace_back(Eigen::VectorXd(q * z));
  }
  return Dataset(std::move(frames));
}

void run_parrot_train(Context& ctx) {
  const auto& c = ctx.cfg;
  Dataset data = c.text("dataset").empty()
                     ? synthetic_dataset(static_cast<std::size_t>(c.integer("dim")),
                                         static_cast<std::size_t>(c.integer("samples")), c.real("spectrum_decay"),
                                         c.seed)
                     : io::read_dataset(c.text("dataset"));
  if (c.text("dataset").empty()) {
    io::write_dataset(ctx.dir / "dataset.csv", data);
    ctx.note("dataset.csv");
  }
  const auto encoder = train_encoder(data, static_cast<std::size_t>(c.integer("bottleneck")));
  DecoderTrainingOptions opts;
  opts.mode = c.text("mode") == "gradient" ? DecoderTrainingMode::gradient : DecoderTrainingMode::closed_form;
  opts.step = c.real("step");
  opts.max_iterations = static_cast<std::size_t>(c.integer("max_iterations"));
  opts.improvement_tol = c.real("improvement_tol");
  const auto trained = train_decoder(encoder, data, opts);

  io::write_coder(ctx.dir / "encoder.csv", encoder);
  ctx.note("encoder.csv");
  io::write_coder(ctx.dir / "decoder.csv", trained.decoder);
  ctx.note("decoder.csv");

  csv::Table errors{{"frame", "external_error", "internal_error"}, {}};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rep = parrot_cycle(encoder, trained.decoder, data[i]);
    errors.rows.push_back({std::to_string(i), format_double(rep.external_error), format_double(rep.internal_error)});
  }
  ctx.write("errors.csv", errors);
  if (opts.mode == DecoderTrainingMode::gradient) {
    csv::Table h{{"iteration", "objective"}, {}};
    for (std::size_t i = 0; i < trained.history.size(); ++i) {
      h.rows.push_back({std::to_string(trained.history_steps[i]), format_double(trained.history[i])});
    }
    ctx.write("history.csv", h);
  }
  auto& s = ctx.summary();
  s["dim"] = data.dim();
  s["samples"] = data.size();
  s["compression_rate"] = compression_rate(encoder, data);
  s["mean_external_error"] = mean_external_error(encoder, trained.decoder, data);
  s["mean_internal_error"] = trained.objective;
  s["iterations"] = trained.iterations;
  s["converged"] = trained.converged;
  s["degenerate_data"] = trained.degenerate_data;
}

void run_collective(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto ext = static_cast<std::size_t>(c.integer("external_dim"));
  const auto ensemble = random_ensemble(static_cast<std::size_t>(c.integer("agents")), ext,
                                        static_cast<std::size_t>(c.integer("code_dim")), c.seed,
                                        c.real("decoder_scale"));
  Rng rng(substream(c.seed, 1));
  std::vector<Frame> frames;
  for (long long f = 0; f < c.integer("frames"); ++f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(ext));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = standard_normal(rng);
    frames.emplace_back(std::move(v));
  }
  const Dataset signals(frames);
  AlignmentOptions opts;
  opts.rounds = static_cast<std::size_t>(c.integer("rounds"));
  opts.tol = c.real("tol");
  opts.damping = c.real("damping");
  opts.self_weight = c.real("self_weight");
  const auto result = align_decoders(ensemble, signals, opts);

  csv::Table hist{{"round", "max_pairwise", "mean_pairwise"}, {}};
  for (const auto& d : result.history) {
    hist.rows.push_back({std::to_string(d.round), format_double(d.max_pairwise), format_double(d.mean_pairwise)});
  }
  ctx.write("discrepancy.csv", hist);

  csv::Table image{{"frame"}, {}};
  for (std::size_t i = 0; i < ext; ++i) image.header.push_back("o" + std::to_string(i));
  for (std::size_t f = 0; f < signals.size(); ++f) {
    const auto obj = objective_image(result.ensemble, signals[f]);
    csv::Row row{std::to_string(f)};
    for (std::size_t i = 0; i < obj.dim(); ++i) row.push_back(format_double(obj[i]));
    image.rows.push_back(std::move(row));
  }
  ctx.write("objective_image.csv", image);

  csv::Table decoders{{"agent", "row"}, {}};
  for (std::size_t j = 0; j < ensemble.code_dim(); ++j) decoders.header.push_back("w" + std::to_string(j));
  for (const auto& a : result.ensemble.agents()) {
    const auto& w = a.decoder.weights();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      csv::Row row{std::to_string(a.id), std::to_string(r)};
      for (Eigen::Index k = 0; k < w.cols(); ++k) row.push_back(format_double(w(r, k)));
      decoders.rows.push_back(std::move(row));
    }
  }
  ctx.write("decoders.csv", decoders);

  auto& s = ctx.summary();
  s["agents"] = ensemble.size();
  s["converged"] = result.converged;
  s["rounds_run"] = result.rounds_run;
  s["initial_max_pairwise"] = result.history.front().max_pairwise;
  s["final_max_pairwise"] = result.history.back().max_pairwise;
}

void run_digital_loop_kind(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto width = static_cast<unsigned>(c.integer("width"));
  const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  const auto n = static_cast<std::size_t>(c.integer("words"));
  Rng rng(c.seed);
  std::vector<BitWord> external, model;
  const std::string kind = c.text("model");
  const double flip = c.real("flip_prob");
  for (std::size_t i = 0; i < n; ++i) external.emplace_back(rng() & mask, width);
  Rng model_rng(substream(c.seed, 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = 0;
    if (kind == "perfect") v = external[i].value();
    else if (kind == "random") v = model_rng() & mask;
    else if (kind == "noisy") {
      v = external[i].value();
      for (unsigned b = 0; b < width; ++b) {
        if (uniform01(model_rng) < flip) v ^= std::uint64_t{1} << b;
      }
    }
    model.emplace_back(v, width);
  }
  const EnergyLedger start(c.real("temperature"));
  const auto r = run_digital_loop(external, model, start, substream(c.seed, 2));

  csv::Table words{{"index", "external", "model", "diff"}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto diff = reversible_subtract(external[i], model[i]).diff;
    words.rows.push_back({std::to_string(i), std::to_string(external[i].value()), std::to_string(model[i].value()),
                          std::to_string(diff.value())});
  }
  ctx.write("words.csv", words);
  const auto& l = r.ledger;
  ctx.write("ledger.csv", {{"temperature_K", "extracted", "erased", "written", "randomized", "joules"},
                           {{format_double(l.temperature()), std::to_string(l.n_extracted()),
                             std::to_string(l.n_erased()), std::to_string(l.n_written()),
                             std::to_string(l.n_randomized()), format_double(l.joules())}}});
  auto& s = ctx.summary();
  s["bits"] = r.residual.size();
  s["residual_ones"] = r.residual.count_ones();
  s["net_joules"] = r.net_joules;
  s["landauer_unit_joules"] = landauer_bit_energy(l.temperature());
}

void run_analog_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  const OscillatorParams p{c.real("mass"), c.real("stiffness"), c.real("friction")};
  const double amp = c.real("amplitude");
  SweepOptions opts;
  opts.settle_damping_times = c.real("settle_damping_times");
  opts.steps_per_period = static_cast<unsigned>(c.integer("steps_per_period"));
  opts.min_window_periods = static_cast<unsigned>(c.integer("min_window_periods"));
  opts.threads = ctx.threads;
  const auto omegas = linspace(c.real("omega_min"), c.real("omega_max"), c.integer("points"));
  const auto pts = frequency_sweep(p, amp, omegas, opts);

  csv::Table t{{"omega", "mean_power_sim", "mean_power_analytic", "residual"}, {}};
  std::size_t peak = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& q = pts[i];
    t.rows.push_back({format_double(q.omega), format_double(q.mean_power_sim), format_double(q.mean_power_analytic),
                      format_double(q.residual)});
    if (q.mean_power_sim > pts[peak].mean_power_sim) peak = i;
    if (q.mean_power_analytic > 0.0) {
      worst = std::max(worst, std::abs(q.mean_power_sim - q.mean_power_analytic) / q.mean_power_analytic);
    }
  }
  ctx.write("sweep.csv", t);

  if (c.has("trace_omega")) {
    const double w = c.real("trace_omega");
    const double dt = c.has("dt") ? c.real("dt") : default_dt(p, w);
    const double duration = c.has("trace_duration") ? c.real("trace_duration") : 20.0 * 2.0 * std::numbers::pi / w;
    const auto tr = simulate(p, Sinusoid{amp, w, 0.0}, 0.0, 0.0, dt, duration);
    csv::Table tt{{"t", "x", "v", "f", "p_in", "p_out", "e_net"}, {}};
    for (std::size_t i = 0; i < tr.size(); ++i) {
      tt.rows.push_back({format_double(tr.t[i]), format_double(tr.x[i]), format_double(tr.v[i]),
                         format_double(tr.f[i]), format_double(tr.p_in[i]), format_double(tr.p_out[i]),
                         format_double(tr.e_net[i])});
    }
    ctx.write("trace.csv", tt);
  }
  auto& s = ctx.summary();
  s["points"] = pts.size();
  s["natural_frequency"] = p.natural_frequency();
  s["peak_omega"] = pts[peak].omega;
  s["peak_power_sim"] = pts[peak].mean_power_sim;
  s["max_relative_error"] = worst;
}

void run_tune_oscillator(Context& ctx) {
  const auto& c = ctx.cfg;
  OscillatorPlantOptions o;
  o.mass = c.real("mass");
  o.friction = c.real("friction");
  o.amplitude = c.real("amplitude");
  o.omega = c.real("omega");
  o.min_stiffness = c.real("k_min");
  o.max_stiffness = c.real("k_max");
  o.simulated = c.text("plant") == "simulated";
  o.sim.steps_per_period = static_cast<unsigned>(c.integer("steps_per_period"));
  const auto plant = oscillator_plant(o);
  const auto runs = static_cast<std::size_t>(c.integer("runs"));
  const double theta0 = std::log(c.real("k_start"));
  const auto results = parallel_map(runs, ctx.threads, [&](std::size_t r) {
    TunerConfig tc{c.real("sigma0"), c.real("beta"), c.real("window"), c.integer("budget"), c.seed + r};
    return tune(plant, {theta0}, tc);
  });

  csv::Table summary{{"run", "seed", "best_k", "best_omega0", "relative_error", "best_power_W"}, {}};
  const double target = o.omega;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const double k = std::exp(results[r].best_theta[0]);
    const double w0 = std::sqrt(k / o.mass);
    const double rel = std::abs(w0 - target) / target;
    if (rel <= 0.05) ++hits;
    summary.rows.push_back({std::to_string(r), std::to_string(c.seed + r), format_double(k), format_double(w0),
                            format_double(rel), format_double(results[r].best_power)});
    const std::string name = runs == 1 ? "history.csv" : "history_" + std::to_string(r) + ".csv";
    ctx.write(name, history_table(results[r], 1));
  }
  ctx.write("runs.csv", summary);
  auto& s = ctx.summary();
  s["runs"] = runs;
  s["runs_within_5_percent"] = hits;
  s["target_omega0"] = target;
  s["best_k_run0"] = std::exp(results[0].best_theta[0]);
  s["best_power_run0"] = results[0].best_power;
  s["skipped_evaluations_run0"] = results[0].skipped.size();
}

CircuitGraph scale_inductance(const CircuitGraph& g, double scale) {
  auto branches = g.branches();
  for (auto& b : branches) b.inductance *= scale;
  return CircuitGraph(g.capacitance(), std::move(branches));
}

void run_tune_network(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto graph = build_random_network(static_cast<int>(c.integer("nodes")), c.real("edge_prob"),
                                          ranges_from(c), c.seed);
  const int node = static_cast<int>(c.integer("drive_node"));
  const double amp = c.real("amplitude"), w = c.real("omega");
  Plant plant;
  plant.bounds = {{std::log(c.real("scale_min")), std::log(c.real("scale_max"))}};
  plant.power = [&](const std::vector<double>& theta) {
    try {
      return phasor_power(scale_inductance(graph, std::exp(theta[0])), node, amp, w);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double theta0 = std::clamp(0.0, plant.bounds[0].lower, plant.bounds[0].upper);
  TunerConfig tc{c.real("sigma0"), c.real("beta"), c.real("window"), c.integer("budget"), substream(c.seed, 1)};
  const auto r = tune(plant, {theta0}, tc);
  io::write_graph(ctx.dir / "nodes.csv", ctx.dir / "edges.csv", graph);
  ctx.note("nodes.csv");
  ctx.note("edges.csv");
  ctx.write("history.csv", history_table(r, 1));
  auto& s = ctx.summary();
  s["cycle_rank"] = cycle_rank(graph);
  s["start_power"] = plant.power({theta0});
  s["best_scale"] = std::exp(r.best_theta[0]);
  s["best_power"] = r.best_power;
  s["skipped_evaluations"] = r.skipped.size();
}

void run_resonet_spectrum(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto graph = build_random_network(static_cast<int>(c.integer("nodes")), c.real("edge_prob"),
                                          ranges_from(c), c.seed);
  io::write_graph(ctx.dir / "nodes.csv", ctx.dir / "edges.csv", graph);
  ctx.note("nodes.csv");
  ctx.note("edges.csv");
  const auto spec = modal_spectrum(graph);
  csv::Table st{{"omega_rad_s", "damping_1_s"}, {}};
  double lo = 0.0, hi = 0.0;
  std::size_t oscillatory = 0;
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    st.rows.push_back({format_double(spec.omega[i]), format_double(spec.damping[i])});
    if (spec.omega[i] > 0.0) {
      if (oscillatory++ == 0) lo = spec.omega[i];
      hi = spec.omega[i];
    }
  }
  ctx.write("spectrum.csv", st);
  auto& s = ctx.summary();
  s["nodes"] = graph.node_count();
  s["edges"] = graph.branch_count();
  s["components"] = connected_components(graph);
  s["cycle_rank"] = cycle_rank(graph);
  s["modes"] = spec.omega.size();
  s["oscillatory_modes"] = oscillatory;

  const auto points = c.integer("sweep_points");
  if (points > 0) {
    const double wmin = c.has("omega_min") ? c.real("omega_min") : (oscillatory ? 0.5 * lo : 0.1);
    const double wmax = c.has("omega_max") ? c.real("omega_max") : (oscillatory ? 1.5 * hi : 10.0);
    NetworkSweepOptions o;
    o.steps_per_period = static_cast<unsigned>(c.integer("steps_per_period"));
    o.settle_damping_times = c.real("settle_damping_times");
    o.max_settle_time = c.real("max_settle_time");
    o.min_window_periods = static_cast<unsigned>(c.integer("min_window_periods"));
    o.threads = ctx.threads;
    const auto sweep = drive_sweep(graph, static_cast<int>(c.integer("drive_node")), c.real("amplitude"),
                                   linspace(wmin, wmax, points), o);
    csv::Table t{{"omega", "mean_power_W"}, {}};
    for (const auto& p : sweep) t.rows.push_back({format_double(p.omega), format_double(p.mean_power)});
    ctx.write("sweep.csv", t);
    json peaks = json::array();
    for (auto i : sweep_peaks(sweep)) peaks.push_back(sweep[i].omega);
    s["sweep_peaks"] = peaks;
  }
}

void run_resonet_scaling(Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<int> sizes;
  for (long long v = c.integer("v_min"); v <= c.integer("v_max"); v += c.integer("v_step")) {
    sizes.push_back(static_cast<int>(v));
  }
  const auto fit = cycle_rank_scaling(sizes, c.real("edge_prob"), c.seed);
  csv::Table t{{"nodes", "edges", "cycle_rank"}, {}};
  for (const auto& p : fit.points) {
    t.rows.push_back({std::to_string(p.nodes), std::to_string(p.edges), std::to_string(p.cycle_rank)});
  }
  ctx.write("scaling.csv", t);
  auto& s = ctx.summary();
  s["edge_prob"] = c.real("edge_prob");
  s["exponent"] = fit.exponent;
  s["intercept"] = fit.intercept;
}

}  // namespace

const char* version_tag() { return PHYSLEARN_VERSION; }

int RunManifest::exit_code() const {
  if (status == "ok") return exit_ok;
  if (status == "config_error") return exit_config_error;
  return exit_runtime_error;
}

nlohmann::ordered_json RunManifest::to_json() const {
  json j;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["version"] = version;
  j["kind"] = kind;
  j["seed"] = seed;
  j["threads"] = threads;
  j["config"] = config;
  j["wall_seconds"] = wall_seconds;
  j["files"] = files;
  j["summary"] = summary;
  return j;
}

fs::path resolve_output_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(cfg.output);
}

void write_manifest(const RunManifest& m) {
  fs::create_directories(m.output_dir);
  std::ofstream out(m.output_dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + m.output_dir.string());
  out << m.to_json().dump(2) << '\n';
}

RunManifest run_experiment(const ExperimentConfig& cfg, unsigned threads_override) {
  RunManifest m;
  m.version = version_tag();
  m.kind = to_string(cfg.kind);
  m.seed = cfg.seed;
  m.threads = threads_override > 0 ? threads_override : cfg.threads;
  m.config = render_config(cfg);
  m.output_dir = resolve_output_dir(cfg);
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(m.output_dir);
    Context ctx{cfg, m.output_dir, m.threads, m};
    switch (cfg.kind) {
      case ExperimentKind::parrot_train: run_parrot_train(ctx); break;
      case ExperimentKind::collective: run_collective(ctx); break;
      case ExperimentKind::digital_loop: run_digital_loop_kind(ctx); break;
      case ExperimentKind::analog_sweep: run_analog_sweep(ctx); break;
      case ExperimentKind::tune_oscillator: run_tune_oscillator(ctx); break;
      case ExperimentKind::tune_network: run_tune_network(ctx); break;
      case ExperimentKind::resonet_spectrum: run_resonet_spectrum(ctx); break;
      case ExperimentKind::resonet_scaling: run_resonet_scaling(ctx); break;
    }
  } catch (const std::exception& e) {
    m.status = "failed";
    m.error = e.what();
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_manifest(m);
  } catch (const std::exception& e) {
    m.status = "failed";
    m.error += (m.error.empty() ? "" : "; ") + std::string(e.what());
  }
  return m;
}

}  // namespace physlearn
