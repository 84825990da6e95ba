// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "greedy/greedy.hpp"
#include "greedy/harness/experiment.hpp"
#include "oracles.hpp"

#ifndef GREEDY_CONFIG_DIR
#error "GREEDY_CONFIG_DIR must point at the sample configs"
#endif

namespace {

using namespace greedy;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

AlgorithmConfig make_config(Algorithm a, std::size_t iterations, ErrorSchedule errors, ErrorMode mode,
                            double t = 1.0, std::uint64_t seed = 1) {
  AlgorithmConfig c;
  c.algorithm = a;
  c.weakness = WeaknessSequence::constant(t);
  c.errors = errors;
  c.error_mode = mode;
  c.max_iterations = iterations;
  c.seed = seed;
  return c;
}

const Reference kZeroReference{0.0, ReferenceSource::kAnalytic, "minimizer in A1"};

// WRGA traces from criteria 1 and 2, re-checked against majorants in criterion 4.
struct MajorantCase {
  std::string label;
  RunTrace trace;
  AlgorithmConfig config;
};
std::vector<MajorantCase> g_wrga_traces;

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const Clock clock;
  const ConvexObjective E = quadratic_objective(vec({0.5, 0.5}));
  const Dictionary d = make_canonical_dictionary(2);
  const AlgorithmConfig cfg = make_config(Algorithm::kWRGA, 100, ErrorSchedule::zero(), ErrorMode::kTolerance);
  const RunTrace tr = run_wrga(E, d, cfg, kZeroReference);
  const double secs = clock.seconds();
  const auto v = tr.values();
  // independent grid check of the two hand-derived line minima
  const double g1 = oracle::grid_min_1d([](double l) { return (l - 0.5) * (l - 0.5) + 0.25; }, 0, 1, 1000001).value;
  const double g2 = oracle::grid_min_1d([](double l) { return 1.25 * l * l - l + 0.25; }, 0, 1, 1000001).value;
  g_wrga_traces.push_back({"worked example", tr, cfg});
  Verdict r;
  r.pass = std::abs(v[0] - 0.5) <= 1e-7 && std::abs(v[1] - 0.25) <= 1e-7 && std::abs(v[2] - 0.05) <= 1e-7 &&
           std::abs(g1 - 0.25) <= 1e-7 && std::abs(g2 - 0.05) <= 1e-7 && secs < 1.0;
  r.detail = fmt("E(G0..2) = %.10g, %.10g, %.10g; grid minima %.10g, %.10g; %.3f s", v[0], v[1], v[2], g1, g2, secs);
  return r;
}

Verdict criterion2() {
  const Clock clock;
  Verdict r;
  int runs = 0, by_slope = 0, by_floor = 0;
  std::string stress;
  double worst_slope = -1e300;
  std::mt19937_64 rng(2);
  std::gamma_distribution<double> expo(1.0, 1.0);
  for (std::size_t n : {2u, 5u, 20u}) {
    const std::size_t count = std::min<std::size_t>(40, 4 * n);
    const Dictionary d = make_random_dictionary(n, count, NormKind(2.0), 100 + n);
    // closest atom pair: <c, a + b> <= 2 <a, b> <= 1 + <a, b> for every other atom c,
    // so the pair spans an edge of the hull and its midpoint lies on the boundary of A1
    std::size_t ea = 0, eb = 1;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        if (j != d.partner(i) && d[i].dot(d[j]) > d[ea].dot(d[eb])) ea = i, eb = j;
      }
    }
    for (const char* shape : {"interior", "combination", "edge"}) {
      Vector f = Vector::Zero(static_cast<Eigen::Index>(n));
      if (std::string(shape) == "edge") {
        f = 0.5 * (d[ea] + d[eb]);
      } else {
        // weight * (convex combination of three atoms): f lies in A1(D), so b = 0
        const double weight = std::string(shape) == "interior" ? 0.9 : 1.0;
        std::vector<double> c(3);
        double total = 0;
        for (double& x : c) total += (x = expo(rng));
        for (double x : c) f += weight * (x / total) * d[rng() % count];
      }
      const ConvexObjective E = quadratic_objective(f);
      for (Algorithm a : {Algorithm::kWRGA, Algorithm::kREGA}) {
        for (bool noisy : {false, true}) {
          const AlgorithmConfig cfg =
              make_config(a, 2000, noisy ? ErrorSchedule::power(0.01, 2.0) : ErrorSchedule::zero(),
                          noisy ? ErrorMode::kInject : ErrorMode::kTolerance, 1.0, 7 + n);
          const RunTrace tr = run(E, d, cfg, kZeroReference);
          const auto am = tr.excess();
          const double floor = *std::min_element(am.begin(), am.end());
          const std::string label = fmt("n=%zu %s %s %s", n, shape, to_string(a), noisy ? "delta" : "exact");
          if (a == Algorithm::kWRGA) g_wrga_traces.push_back({label, tr, cfg});
          std::optional<RateFit> fit;
          try {
            fit = fit_rate_exponent(am, 20, 2000);
          } catch (const InvalidArgument&) {
          }
          if (std::string(shape) == "edge") {
            // boundary stress case, reported but outside the verdict: the fixed
            // window catches the transient while m * a_m climbs to its plateau
            double sup = 0;
            for (std::size_t m = 1; m < am.size(); ++m) sup = std::max(sup, m * am[m]);
            stress += fmt("%s slope %.3f sup m*a_m %.3g, ", label.c_str(), fit ? fit->slope : 0.0, sup);
            continue;
          }
          ++runs;
          if (floor < 1e-12) {
            ++by_floor;
          } else if (fit && fit->slope <= -0.85) {
            ++by_slope;
            worst_slope = std::max(worst_slope, fit->slope);
          } else {
            r.pass = false;
            r.detail += label + fmt(" slope %.4f; ", fit ? fit->slope : 0.0);
          }
        }
      }
    }
  }
  const double secs = clock.seconds();
  if (secs >= 30.0) r.pass = false;
  r.detail += fmt("%d runs: %d by slope (worst %.4f), %d below 1e-12; %.2f s", runs, by_slope, worst_slope,
                  by_floor, secs);
  r.detail += "; hull-edge stress runs (not in verdict): " + stress.substr(0, stress.size() - 2);
  return r;
}

Verdict criterion3() {
  const Vector f = vec({1.2, 0.8});
  const ConvexObjective E = quadratic_objective(f);
  const Dictionary d = make_canonical_dictionary(2);
  const double b = analytic_reference(E, d, Algorithm::kREGA).value;
  const double b_oracle = brute_force_reference(E, d, Algorithm::kREGA).value;
  Verdict r;
  std::string detail;
  for (ErrorMode mode : {ErrorMode::kInject, ErrorMode::kTolerance}) {
    const AlgorithmConfig cfg = make_config(Algorithm::kWGAFR, 2000, ErrorSchedule::power(0.01, 2.0), mode);
    const RunTrace tr = run_wgafr(E, d, cfg, kZeroReference);
    const auto am = tr.excess();
    const double last = am.back();
    std::optional<RateFit> fit;
    try {
      fit = fit_rate_exponent(am, 20, 2000);
    } catch (const InvalidArgument&) {
    }
    const bool floor = *std::min_element(am.begin(), am.end()) < 1e-12;
    const bool ok = last < 1e-4 && ((fit && fit->slope <= -0.85) || floor);
    r.pass = r.pass && ok;
    detail += fmt("WGAFR/%s a_2000 = %.3g slope %s; ", to_string(mode), last,
                  fit ? fmt("%.4f", fit->slope).c_str() : "n/a (below 1e-12)");
  }
  const RunTrace rega = run_rega(E, d, make_config(Algorithm::kREGA, 2000, ErrorSchedule::power(0.01, 2.0),
                                                   ErrorMode::kInject));
  const auto v = rega.values();
  const double lowest = *std::min_element(v.begin(), v.end());
  r.pass = r.pass && lowest >= b - 1e-6 && std::abs(b - 0.5) < 1e-12 && std::abs(b_oracle - b) < 1e-9;
  r.detail = detail + fmt("REGA min E = %.9f vs b = %.9f (grid %.9f)", lowest, b, b_oracle);
  return r;
}

Verdict criterion4() {
  Verdict r;
  const SmoothnessCertificate cert(1.0, 2.0);
  double worst = -1e300;
  for (const auto& c : g_wrga_traces) {
    const MajorantParams p = relaxed_majorant_params(c.trace, cert, c.config);
    if (p.v != c.config.weakness.constant_value() || p.B != std::pow(2.0, 3.0)) {
      r.pass = false;
      r.detail += c.label + ": unexpected majorant parameters; ";
    }
    const DominationReport rep = check_majorant_domination(c.trace, p);
    worst = std::max(worst, rep.max_excess);
    if (!rep.ok) {
      r.pass = false;
      r.detail += c.label + fmt(": violated at m = %zu; ", *rep.first_violation);
    }
  }
  r.detail += fmt("%zu WRGA traces, max(a_m - majorant_m) = %.3g", g_wrga_traces.size(), worst);
  return r;
}

Verdict criterion5() {
  const Clock clock;
  const ConvexObjective E = quadratic_objective(vec({0.5, 0.5}));
  const Dictionary d = make_canonical_dictionary(2);
  Verdict r;
  for (Algorithm a : {Algorithm::kWRGA, Algorithm::kREGA, Algorithm::kWGAFR, Algorithm::kEGAFR}) {
    for (ErrorMode mode : {ErrorMode::kInject, ErrorMode::kTolerance}) {
      const RunTrace tr = run(E, d, make_config(a, 10000, ErrorSchedule::harmonic(1.0), mode), kZeroReference);
      const auto am = tr.excess();
      std::size_t first = 0;
      while (first < am.size() && !(am[first] < 0.01)) ++first;
      const bool ok = first < am.size();
      r.pass = r.pass && ok;
      r.detail += fmt("%s/%s %s; ", to_string(a), to_string(mode),
                      ok ? fmt("m=%zu", first).c_str() : "never below 0.01");
    }
  }
  r.detail += fmt("%.2f s", clock.seconds());
  return r;
}

Verdict criterion6() {
  const ConvexObjective E = quadratic_objective(vec({0.5, 0.5}));
  const Dictionary d = make_canonical_dictionary(2);
  Verdict r;
  const auto exact = run_wrga(E, d, make_config(Algorithm::kWRGA, 100, ErrorSchedule::zero(), ErrorMode::kTolerance),
                              kZeroReference)
                         .excess();
  double exact_constant = 0;
  for (std::size_t m = 1; m < exact.size(); ++m) exact_constant = std::max(exact_constant, m * exact[m]);
  double worst = 0;
  for (ErrorMode mode : {ErrorMode::kInject, ErrorMode::kTolerance}) {
    const auto am = run_wrga(E, d, make_config(Algorithm::kWRGA, 100, ErrorSchedule::constant(1e-4), mode),
                             kZeroReference)
                        .excess();
    for (std::size_t m = 1; m <= 100; ++m) {
      worst = std::max(worst, m * am[m]);
      if (am[m] > 20.0 / static_cast<double>(m)) r.pass = false;
    }
  }
  r.detail = fmt("max_m m*a_m = %.4f (limit 20; exact run %.4f)", worst, exact_constant);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: grid oracles evaluated on plain 2-vectors.

struct PlaneInstance {
  bool quadratic;
  double f0, f1;
  double eval(double x0, double x1) const {
    const double d0 = x0 - f0, d1 = x1 - f1;
    if (quadratic) return d0 * d0 + d1 * d1;
    const double a0 = std::abs(d0), a1 = std::abs(d1);
    return a0 * std::sqrt(a0) + a1 * std::sqrt(a1);
  }
  ConvexObjective objective() const {
    return quadratic ? quadratic_objective(vec({f0, f1})) : p_power_objective(vec({f0, f1}), 1.5);
  }
};

double oracle_line(const PlaneInstance& I, const Vector& G, const Vector& phi) {
  return oracle::grid_min_1d(
             [&](double l) { return I.eval((1 - l) * G[0] + l * phi[0], (1 - l) * G[1] + l * phi[1]); }, 0.0, 1.0,
             1000001)
      .value;
}

// Grid over [-W, W]^2, doubling W while the best point is on the edge.
double oracle_plane(const PlaneInstance& I, const Vector& G, const Vector& phi, double W) {
  for (int growth = 0;; ++growth, W *= 2.0) {
    const auto best = oracle::grid_min_2d(
        [&](double w, double l) { return I.eval((1 - w) * G[0] + l * phi[0], (1 - w) * G[1] + l * phi[1]); }, -W,
        W, 2000);
    if ((std::abs(best.x) < W && std::abs(best.y) < W) || growth == 10) return best.value;
  }
}

Verdict criterion7() {
  const Clock clock;
  Verdict r;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst_excess = -1e300, worst_gap_slack = 1e300;
  std::size_t results = 0;
  auto check = [&](const char* op, int k, double value, double gap, double oracle_min) {
    ++results;
    worst_excess = std::max(worst_excess, value - oracle_min);
    worst_gap_slack = std::min(worst_gap_slack, gap + 1e-9 - (value - oracle_min));
    if (value > oracle_min + 1e-6 || value - oracle_min > gap + 1e-9) {
      r.pass = false;
      r.detail += fmt("%s instance %d: value %.12g oracle %.12g gap %.3g; ", op, k, value, oracle_min, gap);
    }
  };
  constexpr double kWmax = 4.0;
  for (int k = 0; k < 100; ++k) {
    const PlaneInstance I{k % 2 == 0, 0.8 * g(rng), 0.8 * g(rng)};
    const ConvexObjective E = I.objective();
    const std::size_t count = 4 + 2 * (k % 3);
    const Dictionary d = make_random_dictionary(2, count, NormKind(2.0), 1000 + k);
    const Vector G = 0.5 * vec({g(rng), g(rng)});
    const std::size_t i = rng() % count;

    const SearchResult line = line_search_unit_interval(E, G, d[i], 0.0);
    check("line", k, line.value, line.gap, oracle_line(I, G, d[i]));

    const SearchResult free = free_relaxation_search(E, G, d[i], 0.0, kWmax);
    check("free", k, free.value, free.gap, oracle_plane(I, G, d[i], kWmax));

    const SearchResult joint = joint_dict_line_search(E, G, d, 0.0);
    double best = 1e300;
    for (std::size_t j = 0; j < count; ++j) best = std::min(best, oracle_line(I, G, d[j]));
    check("joint-line", k, joint.value, joint.gap, best);

    const SearchResult joint_free = joint_dict_free_search(E, G, d, 0.0, kWmax);
    best = 1e300;
    // atom j and its negation span the same (w, lambda) plane over a symmetric box
    for (std::size_t j = 0; j < count; ++j) {
      if (d.partner(j) > j) best = std::min(best, oracle_plane(I, G, d[j], kWmax));
    }
    check("joint-free", k, joint_free.value, joint_free.gap, best);
  }
  const double secs = clock.seconds();
  if (secs >= 60.0) r.pass = false;
  r.detail += fmt("%zu results, max(value - grid) = %.3g, min gap slack = %.3g; %.2f s", results, worst_excess,
                  worst_gap_slack, secs);
  return r;
}

Verdict criterion8() {
  const Lemma34Params p(1.0, 2.0, 1.0);
  const double c3 = lemma34_empirical_check(p, 0.5, lemma34_worst_case, 1000).C;
  const double c4 = lemma34_empirical_check(p, 0.5, lemma34_worst_case, 10000).C;
  Verdict r;
  r.pass = std::isfinite(c3) && std::isfinite(c4) && c3 > 0 && std::abs(c4 / c3 - 1.0) <= 0.05;
  r.detail = fmt("C(10^3) = %.6f, C(10^4) = %.6f, ratio %.6f", c3, c4, c4 / c3);
  return r;
}

Verdict criterion9() {
  Verdict r;
  auto fail = [&](const std::string& what) {
    r.pass = false;
    r.detail += what + "; ";
  };
  std::size_t checks = 0;

  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Dictionary d = make_random_dictionary(3, 10, NormKind(p), seed);
      for (std::size_t i = 0; i < d.size(); ++i) {
        ++checks;
        if (d.partner(d.partner(i)) != i || d[d.partner(i)] != -d[i]) fail("dictionary symmetry");
      }
    }
  }

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int k = 0; k < 8; ++k) {
    const std::size_t n = 2 + k % 3;
    Vector f(static_cast<Eigen::Index>(n));
    for (auto& x : f) x = 0.7 * g(rng);
    const ConvexObjective E = k % 2 ? quadratic_objective(f) : p_power_objective(f, 1.5);
    const Dictionary d = make_random_dictionary(n, 2 * n + 4, NormKind(2.0), 50 + k);
    for (Algorithm a : {Algorithm::kWRGA, Algorithm::kREGA, Algorithm::kWGAFR, Algorithm::kEGAFR}) {
      const RunTrace exact = run(E, d, make_config(a, 40, ErrorSchedule::zero(), ErrorMode::kTolerance));
      const auto v = exact.values();
      for (std::size_t m = 1; m < v.size(); ++m) {
        ++checks;
        if (v[m] > v[m - 1] + 1e-10) fail(fmt("%s exact monotonicity at m=%zu", to_string(a), m));
      }
      for (const auto& rec : exact.records) {
        ++checks;
        if ((rec.snapshot.materialize(d) - rec.snapshot.vector()).norm() > 1e-10) fail("expansion soundness");
        if (!uses_free_relaxation(a) && rec.snapshot.l1_weight() > 1.0 + 1e-10) fail("A1 membership");
      }
      const RunTrace noisy = run(E, d, make_config(a, 40, ErrorSchedule::constant(0.01), ErrorMode::kInject));
      const auto w = noisy.values();
      for (std::size_t m = 1; m < w.size(); ++m) {
        ++checks;
        if (w[m] > w[m - 1] + noisy.records[m - 1].delta + 1e-10) fail("relaxed monotonicity");
      }
    }
    for (ErrorMode mode : {ErrorMode::kInject, ErrorMode::kTolerance}) {
      const RunTrace unit = run_wgafr(E, d, make_config(Algorithm::kWGAFR, 30, ErrorSchedule::constant(1.0), mode));
      for (double x : unit.values()) {
        ++checks;
        if (x > unit.initial_value + 1.0 + 1e-12) fail("free-relaxation bound E(G_m) <= E(0) + 1");
      }
    }
    for (int probe = 0; probe < 100; ++probe) {
      Vector x(static_cast<Eigen::Index>(n));
      for (auto& xi : x) xi = g(rng);
      ++checks;
      const Vector fd = oracle::finite_difference_gradient(E, x);
      if ((fd - E.gradient(x)).norm() > 1e-5 * std::max(1.0, fd.norm())) fail("gradient vs finite differences");
    }
  }

  const std::vector<double> grid{0.01, 0.03, 0.1, 0.3, 1.0};
  for (std::size_t n : {2u, 5u}) {
    Vector f(static_cast<Eigen::Index>(n));
    for (auto& x : f) x = 0.4 * g(rng);
    const ConvexObjective E = quadratic_objective(f);
    const Dictionary d = make_canonical_dictionary(n);
    const auto est = estimate_modulus(E, sublevel_sampler(E, d, 0.0), grid, 200, NormKind(2.0), 3);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ++checks;
      if (std::abs(est.rho[k] / (grid[k] * grid[k]) - 1.0) > 1e-6) fail("modulus calibration rho = u^2");
    }
  }
  r.detail += fmt("%zu checks", checks);
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion10() {
  Verdict r;
  const fs::path base = fs::temp_directory_path() / "greedy_acceptance_determinism";
  fs::remove_all(base);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(GREEDY_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    const harness::ExperimentConfig cfg = harness::parse_config(entry.path());
    const auto a = harness::run_experiment(cfg, base / "a");
    const auto b = harness::run_experiment(cfg, base / "b");
    const std::string name = a.config_hash + ".trace.csv";
    ++compared;
    if (a.config_hash != b.config_hash || read_file(base / "a" / name) != read_file(base / "b" / name) ||
        read_file(base / "a" / name).empty()) {
      r.pass = false;
      r.detail += entry.path().filename().string() + " differs; ";
    }
  }
  fs::remove_all(base);
  if (compared == 0) r.pass = false;
  r.detail += fmt("%zu configs rerun, trace CSVs compared byte for byte", compared);
  return r;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<Verdict()> fn;
  };
  const std::vector<Entry> criteria{
      {1, "worked-example golden trace", criterion1},
      {2, "q=2 rate of WRGA/REGA on A1 quadratics", criterion2},
      {3, "free relaxation reaches the unconstrained optimum; REGA stalls at b", criterion3},
      {4, "majorant domination of WRGA traces", criterion4},
      {5, "convergence under errors 1/(k+2)", criterion5},
      {6, "constant-error plateau a_m <= 20/m", criterion6},
      {7, "search results against grid oracles", criterion7},
      {8, "perturbed-recurrence constant stability", criterion8},
      {9, "invariant suite", criterion9},
      {10, "determinism of trace CSVs", criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
