// Command-line entry point: run experiments and suites, check smoothness
// certificates, and print majorant sequences.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "greedy/analysis.hpp"
#include "greedy/harness/experiment.hpp"

namespace {

using namespace greedy;
using namespace greedy::harness;

// "zero" | "constant:D" | "power:C,Q" | "harmonic:C"
ErrorSchedule parse_schedule(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "zero") return ErrorSchedule::zero();
  const auto values = harness::detail::parse_list("--schedule", args);
  if (kind == "constant" && values.size() == 1) return ErrorSchedule::constant(values[0]);
  if (kind == "power" && values.size() == 2) return ErrorSchedule::power(values[0], values[1]);
  if (kind == "harmonic" && values.size() == 1) return ErrorSchedule::harmonic(values[0]);
  throw InvalidArgument("--schedule: expected zero | constant:D | power:C,Q | harmonic:C");
}

int cmd_run(const std::string& config, const std::string& out) {
  const ExperimentConfig cfg = parse_config(config);
  const ExperimentReport rep = run_experiment(cfg, out);
  std::cout << report_json(rep).dump(2) << "\n";
  if (rep.aborted) return kExitNumerical;
  return kExitOk;
}

int cmd_suite(const std::string& dir, const std::string& out, unsigned jobs) {
  const SuiteSummary s = run_suite(dir, out, jobs);
  write_suite_csv(s, std::cout);
  return s.exit_code();
}

int cmd_check_modulus(const std::string& config) {
  const ExperimentConfig cfg = parse_config(config);
  const ConvexObjective obj = build_objective(cfg);
  const Dictionary dict = build_dictionary(cfg);
  if (!obj.smoothness()) throw InvalidArgument("objective has no smoothness certificate");
  const ModulusEstimate est = estimate_modulus(obj, certificate_sampler(cfg, obj, dict), cfg.modulus_u,
                                               cfg.modulus_samples, NormKind(cfg.norm_p), cfg.seed);
  const CertificateReport rep = check_certificate(est, *obj.smoothness());
  std::cout << "u,rho_estimate,bound,ratio\n";
  for (std::size_t k = 0; k < est.u.size(); ++k) {
    const double bound = obj.smoothness()->bound(est.u[k]);
    std::printf("%.17g,%.17g,%.17g,%.17g\n", est.u[k], est.rho[k], bound, est.rho[k] / bound);
  }
  std::printf("# gamma=%.17g q=%.17g max_ratio=%.17g certificate_ok=%s\n", obj.smoothness()->gamma(),
              obj.smoothness()->q(), rep.max_ratio, rep.ok ? "true" : "false");
  return rep.ok ? kExitOk : kExitCheckFailed;
}

int cmd_majorant(double v, double B, double q, double a0, const std::string& schedule, std::size_t m) {
  MajorantParams p;
  p.v = v;
  p.B = B;
  p.q = q;
  p.a0 = a0;
  p.delta = parse_schedule(schedule);
  const auto a = majorant_sequence(p, m);
  std::cout << "m,a_m\n";
  for (std::size_t i = 0; i < a.size(); ++i) std::printf("%zu,%.17g\n", i, a[i]);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy-type convex optimization experiments"};
  app.require_subcommand(1);

  std::string config, dir, out;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config, "config file")->required();
  run->add_option("--out", out, "output directory");

  auto* suite = app.add_subcommand("suite", "run every config in a directory");
  suite->add_option("dir", dir, "directory of configs")->required();
  suite->add_option("--out", out, "output directory");
  suite->add_option("--jobs", jobs, "experiments run concurrently")->check(CLI::PositiveNumber);

  auto* modulus = app.add_subcommand("check-modulus", "estimate the modulus of smoothness and check the certificate");
  modulus->add_option("config", config, "config file")->required();

  double v = 1.0, B = 1.0, q = 2.0, a0 = 0.0;
  std::string schedule = "zero";
  std::size_t m = 100;
  auto* majorant = app.add_subcommand("majorant", "print the extremal majorant sequence");
  majorant->add_option("--v", v, "rate constant v in (0,1]")->required();
  majorant->add_option("--B", B, "smoothness constant B > 0")->required();
  majorant->add_option("--q", q, "smoothness exponent q in (1,2]")->required();
  majorant->add_option("--a0", a0, "initial value a_0 >= 0")->required();
  majorant->add_option("--schedule", schedule, "zero | constant:D | power:C,Q | harmonic:C");
  majorant->add_option("--m", m, "number of terms")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*suite) return cmd_suite(dir, out, jobs);
    if (*modulus) return cmd_check_modulus(config);
    if (*majorant) return cmd_majorant(v, B, q, a0, schedule, m);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
