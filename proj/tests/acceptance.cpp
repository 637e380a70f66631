// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "physlearn/analog.hpp"
#include "physlearn/autoencoder.hpp"
#include "physlearn/collective.hpp"
#include "physlearn/config.hpp"
#include "physlearn/digital.hpp"
#include "physlearn/experiment.hpp"
#include "physlearn/random.hpp"
#include "physlearn/resonet.hpp"
#include "physlearn/tuner.hpp"
#include "test_support.hpp"

using namespace physlearn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Exhaustive reversible round trip over all 8-bit pairs.
void reversibility(Outcome& o) {
  const auto t0 = Clock::now();
  long long bad = 0;
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::uint64_t b = 0; b < 256; ++b) {
      const BitWord F(a), f(b);
      const auto s = reversible_subtract(F, f);
      const auto r = reversible_restore(s.diff, s.keep);
      if (!(r.F == F && r.f == f) || s.diff.value() != ((a - b) & 0xFF)) ++bad;
    }
  }
  const double dt = seconds_since(t0);
  o.detail << "65536 pairs, " << bad << " mismatches, " << dt << " s";
  o.require(bad == 0, "round trip");
  o.require(dt < 1.0, "time < 1 s");
}

// 2. Perfect prediction nets k_B T ln 2 per bit; reversible stages net zero.
void landauer_ledger(Outcome& o) {
  Rng rng(2024);
  std::vector<BitWord> words;
  for (int i = 0; i < 1000; ++i) words.emplace_back(rng() & 0xFF, 8);
  const auto r = run_digital_loop(words, words, EnergyLedger(300.0), 1);
  const long double oracle = 8000.0L * 1.380649e-23L * 300.0L * std::log(2.0L);
  const double rel = static_cast<double>(std::fabs((static_cast<long double>(r.net_joules) - oracle) / oracle));
  o.detail << "net " << r.net_joules << " J, relative error " << rel;
  o.require(rel <= 1e-12, "relative error <= 1e-12");
  o.require(r.ledger.n_extracted() == 8000 && r.ledger.n_erased() == 0 && r.ledger.n_written() == 0,
            "ledger counters");

  // A pipeline made only of reversible stages never touches the ledger.
  EnergyLedger ledger(300.0);
  const EnergyLedger before = ledger;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    const auto s = reversible_subtract(words[i], words[i + 1]);
    const auto back = reversible_restore(s.diff, s.keep);
    if (!(back.F == words[i])) ledger = ledger_transact(ledger, LedgerOp::erase, 1);
  }
  o.detail << "; reversible-only net " << ledger.joules() << " J";
  o.require(ledger == before && ledger.joules() == 0.0, "reversible pipeline nets exactly 0");
}

// 3. Extractor output looks like fair coin flips.
void randomization(Outcome& o) {
  const std::size_t n = 100000;
  const ResidualStream zeros(std::vector<std::uint8_t>(n, 0));
  const double sigma = 0.5 / std::sqrt(static_cast<double>(n));
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = extract_from_residual(zeros, EnergyLedger(300.0), seed);
    const double frac = static_cast<double>(r.out.count_ones()) / static_cast<double>(n);
    worst = std::max(worst, std::abs(frac - 0.5) / sigma);
  }
  o.detail << "worst deviation " << worst << " sigma over 10 seeds";
  o.require(worst <= 3.0, "within 3 sigma");
}

// 4. Simulated absorbed power against the closed-form Lorentzian.
void analog_resonance(Outcome& o) {
  const auto t0 = Clock::now();
  const OscillatorParams p{1.0, 1.0, 0.5};
  const double at_w0 = steady_state_point(p, 1.0, 1.0).mean_power_sim;
  const double rel0 = std::abs(at_w0 - 1.0);  // F0^2 / (2 gamma) = 1
  std::vector<double> omegas;
  for (int i = 0; i < 50; ++i) omegas.push_back(0.1 + 2.9 * i / 49.0);
  const auto sweep = frequency_sweep(p, 1.0, omegas);
  double worst = 0.0;
  for (const auto& pt : sweep) {
    const double oracle = 0.5 * 0.5 / (0.25 + std::pow((pt.omega * pt.omega - 1.0) / pt.omega, 2));
    worst = std::max(worst, std::abs(pt.mean_power_sim - oracle) / oracle);
  }
  const double dt = seconds_since(t0);
  o.detail << "P(w0) = " << at_w0 << " (rel " << rel0 << "), sweep worst rel " << worst << ", " << dt << " s";
  o.require(rel0 <= 0.01, "power at w0 within 1%");
  o.require(worst <= 0.02, "sweep within 2%");
  o.require(dt < 10.0, "time < 10 s");
}

// Dyadic rational with a 20-bit mantissa in [2^lo, 2^hi).
double dyadic(Rng& rng, int lo, int hi) {
  const double mantissa = static_cast<double>((rng() >> 44) | (1ULL << 19));
  const int e = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo));
  return std::ldexp(mantissa, e - 19);
}

// 5. Resonance condition.
void resonance_condition(Outcome& o) {
  Rng rng(55);
  long long nonzero = 0;
  for (int i = 0; i < 100000; ++i) {
    const double g = dyadic(rng, -4, 4);
    const double f = g * dyadic(rng, -4, 4);  // exact: 40-bit product
    if (net_power(f, f / g, g) != 0.0) ++nonzero;
  }
  double generic_worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double f = uniform(rng, -5, 5), g = log_uniform(rng, 0.01, 10);
    generic_worst = std::max(generic_worst, std::abs(net_power(f, f / g, g)) / (f * f / g));
  }
  o.detail << "representable grid: " << nonzero << " nonzero of 1e5; generic floats worst |P|/(f^2/g) "
           << generic_worst;
  o.require(nonzero == 0, "exact zero on representable grid");

  double worst_v = 0.0, worst_p = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double f = uniform(rng, 0.1, 5), g = log_uniform(rng, 0.01, 10);
    const int n = 20001;
    double best_v = 0.0, best_p = -INFINITY;
    for (int j = 0; j < n; ++j) {
      const double v = (f / g) * j / (n - 1);
      const double pw = net_power(f, v, g);
      if (pw > best_p) best_p = pw, best_v = v;
    }
    worst_v = std::max(worst_v, std::abs(best_v - f / (2 * g)) / (f / (2 * g)));
    worst_p = std::max(worst_p, std::abs(best_p - f * f / (4 * g)) / (f * f / (4 * g)));
  }
  o.detail << "; argmax worst rel " << worst_v << ", max worst rel " << worst_p;
  o.require(worst_v <= 0.005 && worst_p <= 0.005, "grid maximum at f/(2g)");

  const OscillatorParams p{1.0, 1.0, 0.5};
  auto residual_at = [&](double w) {
    const ForceSignal force(Sinusoid{1.0, w, 0.0});
    const auto tr = simulate(p, force, 0.0, 0.0, default_dt(p, w), 200.0);
    return resonance_residual(tr, force, p.friction).value;
  };
  const double r1 = residual_at(1.0), r2 = residual_at(2.0);
  o.detail << "; residual " << r1 << " at w0, " << r2 << " at 2 w0";
  o.require(r1 < 0.05, "residual at w0 < 0.05");
  o.require(r2 > 0.5, "residual at 2 w0 > 0.5");
}

// 6. Noise-driven tuner on the simulated oscillator.
void tuner_efficacy(Outcome& o) {
  const auto t0 = Clock::now();
  OscillatorPlantOptions po;
  po.sim.steps_per_period = 200;
  const Plant plant = oscillator_plant(po);
  const std::vector<double> theta0{std::log(4.0)};  // omega0 = 2, drive at 1
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TunerConfig cfg{0.1, 0.5, 10, 2000, seed};
    const auto r = tune(plant, theta0, cfg);
    const double w0 = std::sqrt(std::exp(r.best_theta[0]));
    if (std::abs(w0 - 1.0) <= 0.05) ++hits;
  }

  // Brake off: the trajectory is a uniform walk mirrored at the bounds.
  const TunerConfig free_cfg{0.1, 0.0, 10, 2000, 7};
  const auto r = tune(plant, theta0, free_cfg);
  const double lo = plant.bounds[0].lower, hi = plant.bounds[0].upper;
  Rng rng(7);
  double x = theta0[0];
  long long diverged = 0;
  for (const auto& rec : r.history) {
    if (rec.theta[0] != x) ++diverged;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x += -0.1 + 0.2 * u;
    if (x > hi) x = 2 * hi - x;
    if (x < lo) x = 2 * lo - x;
  }
  const double dt = seconds_since(t0);
  o.detail << hits << "/20 runs within 5%; free walk " << diverged << " mismatches of " << r.history.size()
           << "; " << dt << " s";
  o.require(hits >= 19, ">= 19 of 20");
  o.require(diverged == 0 && r.history.size() == 2000, "beta = 0 walk exact");
  o.require(dt < 120.0, "time < 2 min");
}

Dataset random_dataset(Rng& rng, Eigen::Index d, Eigen::Index n) {
  std::vector<Frame> frames;
  for (Eigen::Index i = 0; i < n; ++i) frames.emplace_back(Eigen::VectorXd(testing::random_matrix(rng, d, 1)));
  return Dataset(std::move(frames));
}

// 7. Decoder and encoder training.
void training(Outcome& o) {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(std::min<Eigen::Index>(d, 4)));
    const Eigen::Index n = d + static_cast<Eigen::Index>(rng() % 12);  // codes of full rank k
    const Eigen::MatrixXd a = testing::random_matrix(rng, k, d);
    const auto data = random_dataset(rng, d, n);
    const auto grad = train_decoder(LinearCoder::encoder(a), data, {.mode = DecoderTrainingMode::gradient});
    // Least-squares oracle: X = a^+ C C^+ minimizes |a X C - C|.
    const Eigen::MatrixXd c = a * data.as_columns();
    const Eigen::MatrixXd x = a.completeOrthogonalDecomposition().pseudoInverse() * c *
                              c.completeOrthogonalDecomposition().pseudoInverse();
    const double oracle = (a * x * c - c).squaredNorm() / static_cast<double>(n * k);
    worst = std::max(worst, std::abs(grad.objective - oracle));
  }
  o.detail << "gradient vs least squares worst " << worst;
  o.require(worst <= 1e-6, "decoder within 1e-6");

  double worst_proj = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d));
    const Eigen::MatrixXd q = testing::random_orthogonal(rng, d);
    Eigen::VectorXd mean(d);
    for (auto& v : mean) v = uniform(rng, -3, 3);
    std::vector<Frame> frames;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double lambda = (j < k ? 10.0 : 1.0) + uniform(rng, 0, 0.5);
      const Eigen::VectorXd offset = std::sqrt(static_cast<double>(d) * lambda) * q.col(j);
      frames.emplace_back(Eigen::VectorXd(mean + offset));
      frames.emplace_back(Eigen::VectorXd(mean - offset));
    }
    const auto enc = train_encoder(Dataset(frames), static_cast<std::size_t>(k));
    const Eigen::MatrixXd planted = q.leftCols(k) * q.leftCols(k).transpose();
    worst_proj = std::max(worst_proj, (row_space_projector(enc.weights()) - planted).norm());
  }
  o.detail << "; projector worst " << worst_proj;
  o.require(worst_proj <= 1e-8, "projector within 1e-8");
}

// 8. Collective alignment.
void collective(Outcome& o) {
  const auto ens = random_ensemble(8, 1, 3, 8);
  const Frame signal{1.0};
  const auto r = align_decoders(ens, signal, {.rounds = 10000, .tol = 1e-8});
  const auto m = broadcast_round(r.ensemble, signal);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t k = 0; k < m.size(); ++k)
      if (i != k) worst = std::max(worst, mean_squared_error(m(i, i), m(i, k)));
  o.detail << "N = 8 max pairwise " << worst << " after " << r.rounds_run << " rounds";
  o.require(worst <= 1e-4, "N = 8 converges");

  const auto big = random_ensemble(6, 4, 2, 21);
  const Frame f4{0.1, -0.7, 2.2, 1.0};
  const Frame reference = objective_image(big, f4);
  std::vector<Agent> agents = big.agents();
  Rng rng(3);
  int differing = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(agents.begin(), agents.end(), rng);
    if (!(objective_image(Ensemble(agents), f4) == reference)) ++differing;
  }
  o.detail << "; " << differing << " of 50 permutations change Obj";
  o.require(differing == 0, "exact permutation invariance");

  auto scalar = [](int id, double e, double d) {
    return Agent{id, LinearCoder::encoder(Eigen::MatrixXd::Constant(1, 1, e)),
                 LinearCoder::decoder(Eigen::MatrixXd::Constant(1, 1, d))};
  };
  const auto two = align_decoders(Ensemble({scalar(1, 1.0, 0.3), scalar(2, 2.0, 1.7)}), Frame{0.8},
                                  {.rounds = 10000, .tol = 1e-16});
  const double gap = std::abs(two.ensemble[0].decoder.weights()(0, 0) * 1.0 -
                              two.ensemble[1].decoder.weights()(0, 0) * 2.0);
  o.detail << "; N = 2 |D1E1 - D2E2| = " << gap;
  o.require(gap <= 1e-6, "N = 2 fixed point");
}

long long loops_by_spanning_forest(const CircuitGraph& g) {
  const int n = g.node_count() + 1;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& b : g.branches()) {
    const int a = b.a == kGround ? n - 1 : b.a, c = b.b == kGround ? n - 1 : b.b;
    adj[a].push_back(c);
    adj[c].push_back(a);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  long long tree = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = true;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (!seen[v]) seen[v] = true, ++tree, q.push(v);
    }
  }
  return g.branch_count() - tree;
}

// 9. Network structure and spectra.
void networks(Outcome& o) {
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int v = 1 + static_cast<int>(seed % 30);
    const double p = static_cast<double>(seed % 10) / 10.0;
    const auto g = build_random_network(v, p, {}, 1000 + seed);
    if (cycle_rank(g) != loops_by_spanning_forest(g)) ++mismatches;
  }
  o.detail << mismatches << " cycle-rank mismatches of 100";
  o.require(mismatches == 0, "cycle rank");

  std::vector<int> sizes;
  for (int v = 10; v <= 60; v += 5) sizes.push_back(v);
  const auto fit = cycle_rank_scaling(sizes, 0.9, 1);
  o.detail << "; exponent " << fit.exponent;
  o.require(std::abs(fit.exponent - 2.0) <= 0.2, "exponent 2 +- 0.2");

  Rng rng(9);
  double lc_worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double c = log_uniform(rng, 0.1, 10), l = log_uniform(rng, 0.1, 10);
    const auto s = modal_spectrum(CircuitGraph({c}, {Branch{0, kGround, l, 0.0}}));
    lc_worst = std::max(lc_worst, std::abs(s.omega.at(0) * std::sqrt(l * c) - 1.0));
  }
  o.detail << "; LC worst rel " << lc_worst;
  o.require(lc_worst <= 1e-6, "LC eigenfrequency");

  double real_worst = 0.0;
  NetworkRanges lossless;
  lossless.resistance = {0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ev = state_eigenvalues(build_random_network(4 + static_cast<int>(seed % 12), 0.6, lossless, seed));
    for (const auto& e : ev) real_worst = std::max(real_worst, std::abs(e.real()));
  }
  o.detail << "; lossless worst |Re| " << real_worst;
  o.require(real_worst <= 1e-8, "lossless purely imaginary");

  const CircuitGraph ladder({1.0, 0.5},
                            {Branch{0, kGround, 1.0, 0.02}, Branch{0, 1, 2.0, 0.02}, Branch{1, kGround, 0.7, 0.02}});
  const double step = 0.05;
  std::vector<double> omegas;
  for (int i = 0; i < 50; ++i) omegas.push_back(0.2 + step * i);
  const auto pts = drive_sweep(ladder, 0, 1.0, omegas);
  const auto spec = modal_spectrum(ladder);
  const auto peaks = sweep_peaks(pts);
  double off = 0.0;
  for (auto i : peaks) {
    double nearest = INFINITY;
    for (double w : spec.omega) nearest = std::min(nearest, std::abs(w - pts[i].omega));
    off = std::max(off, nearest);
  }
  const double dt = seconds_since(t0);
  o.detail << "; " << peaks.size() << " sweep peaks, worst offset " << off << " (grid " << step << "); " << dt
           << " s";
  o.require(peaks.size() == 2 && off <= step, "peaks align with eigenfrequencies");
  o.require(dt < 120.0, "time < 2 min");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 10. Byte-identical outputs across runs and thread counts.
void reproducibility(Outcome& o) {
  const std::vector<std::pair<std::string, std::string>> kinds{
      {"parrot_train", "dim = 6\nbottleneck = 2\nsamples = 100\nmode = gradient\n"},
      {"collective", "agents = 8\ncode_dim = 3\nframes = 2\n"},
      {"digital_loop", "words = 1000\nmodel = noisy\nflip_prob = 0.05\n"},
      {"analog_sweep", "omega_min = 0.2\nomega_max = 3\npoints = 20\nsteps_per_period = 200\ntrace_omega = 1\n"},
      {"tune_oscillator", "budget = 200\nruns = 4\nsteps_per_period = 50\n"},
      {"tune_network", "nodes = 6\nomega = 1\nbudget = 200\n"},
      {"resonet_spectrum", "nodes = 5\nsweep_points = 12\nr_min = 0.1\nr_max = 0.5\n"},
      {"resonet_scaling", ""},
  };
  const auto root = fs::temp_directory_path() / "physlearn_acceptance";
  fs::remove_all(root);
  int files = 0, differing = 0;
  for (const auto& [kind, extra] : kinds) {
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, 1u, 4u}) {
      const auto dir = root / (kind + "_" + std::to_string(dirs.size()));
      const auto cfg = validate_config("kind = " + kind + "\nseed = 5\noutput = " + dir.string() + "\n" + extra);
      if (run_experiment(cfg, threads).exit_code() != exit_ok) {
        o.require(false, kind + " run failed");
        return;
      }
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename();
      if (name == "manifest.json") continue;
      ++files;
      const auto ref = slurp(entry.path());
      if (slurp(dirs[1] / name) != ref || slurp(dirs[2] / name) != ref) ++differing;
    }
  }
  fs::remove_all(root);
  o.detail << kinds.size() << " kinds, " << files << " CSVs, " << differing << " differ across runs/threads";
  o.require(differing == 0 && files > 0, "byte-identical");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"reversible round trip", reversibility},
      {"Landauer ledger", landauer_ledger},
      {"extractor randomization", randomization},
      {"analog resonance", analog_resonance},
      {"resonance condition", resonance_condition},
      {"tuner efficacy", tuner_efficacy},
      {"decoder and encoder training", training},
      {"collective convergence", collective},
      {"network structure", networks},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
