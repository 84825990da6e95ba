#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "greedy/algorithms.hpp"
#include "greedy/analysis.hpp"
#include "greedy/harness/experiment_config.hpp"
#include "greedy/reference.hpp"

namespace greedy::harness {

inline ConvexObjective build_objective(const ExperimentConfig& c) {
  const NormKind norm(c.norm_p);
  switch (c.objective) {
    case ObjectiveKind::kQuadratic: return quadratic_objective(c.f, norm);
    case ObjectiveKind::kPPower: return p_power_objective(c.f, c.power, norm);
    case ObjectiveKind::kLogSumExp: return log_sum_exp_objective(c.a, c.b, norm);
    case ObjectiveKind::kCustom: break;
  }
  throw ConfigError("objective.kind", "not constructible from a config");
}

inline Dictionary build_dictionary(const ExperimentConfig& c) {
  const NormKind norm(c.norm_p);
  if (c.dictionary == DictionaryKind::kCanonical) return make_canonical_dictionary(c.dimension(), norm);
  return make_random_dictionary(c.dimension(), c.dictionary_count, norm, c.dictionary_seed);
}

inline std::optional<Reference> resolve_reference(const ExperimentConfig& c, const ConvexObjective& obj,
                                                  const Dictionary& dict) {
  switch (c.reference) {
    case ReferenceMode::kNone: return std::nullopt;
    case ReferenceMode::kAnalytic:
      if (c.reference_value) return Reference{*c.reference_value, ReferenceSource::kSupplied, "bref.value"};
      return analytic_reference(obj, dict, c.algorithm);
    case ReferenceMode::kBruteForce: return brute_force_reference(obj, dict, c.algorithm);
  }
  return std::nullopt;
}

// Sampler over the smoothness domain the algorithm's bound needs.
inline DomainSampler certificate_sampler(const ExperimentConfig& c, const ConvexObjective& obj,
                                         const Dictionary& dict) {
  if (uses_free_relaxation(c.algorithm)) {
    const double radius = 2.0 * std::max(1.0, c.a_eps.value_or(1.0));
    return sublevel_sampler(obj, dict, 1.0, radius);
  }
  return sublevel_sampler(obj, dict, 0.0, 1.0);
}

// C0 = 1 + sup_{D1} ||x||_2 and A(0) = ||f||_1 are known for the quadratic
// with the canonical dictionary in l2.
inline std::optional<std::pair<double, double>> free_relaxation_constants(const ExperimentConfig& c,
                                                                          const Dictionary& dict) {
  std::optional<double> a_eps = c.a_eps, c0 = c.c0;
  if (c.objective == ObjectiveKind::kQuadratic && c.norm_p == 2.0) {
    const double r = c.f.norm();
    if (!c0) c0 = 1.0 + r + std::sqrt(r * r + 1.0);
    if (!a_eps && is_canonical(dict)) a_eps = std::max(1.0, c.f.cwiseAbs().sum());
  }
  if (!a_eps || !c0) return std::nullopt;
  return std::make_pair(*a_eps, *c0);
}

struct ExperimentReport {
  std::string config_hash;
  Algorithm algorithm = Algorithm::kWRGA;
  std::optional<RateFit> fit;
  std::optional<std::string> fit_error;
  std::optional<bool> majorant_ok;
  std::optional<bool> certificate_ok;
  std::size_t iterations = 0;
  bool aborted = false;
  std::string abort_reason;
  double wall_ms = 0.0;
  RunTrace trace;

  bool checks_passed() const { return !aborted && majorant_ok.value_or(true) && certificate_ok.value_or(true); }
};

namespace detail {

inline std::string cell(double v) { return format_double(v); }

}  // namespace detail

inline const char* kTraceHeader = "m,atom_index,lambda,w,E_value,a_m,delta_applied,injected_error,l1_weight";

// Trace CSV; absent fields are empty cells.
inline void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  using detail::cell;
  const bool has_b = trace.reference.has_value();
  const double b = has_b ? trace.reference->value : 0.0;
  auto excess = [&](double v) { return has_b ? cell(v - b) : std::string(); };
  os << kTraceHeader << "\n";
  os << "0,,,," << cell(trace.initial_value) << "," << excess(trace.initial_value) << ",,,0\n";
  for (const auto& r : trace.records) {
    os << r.m << "," << (r.atom ? std::to_string(*r.atom) : "") << "," << cell(r.lambda) << ","
       << (r.w ? cell(*r.w) : "") << "," << cell(r.value) << "," << excess(r.value) << ","
       << cell(r.delta) << "," << cell(r.injected_error) << "," << cell(r.snapshot.l1_weight()) << "\n";
  }
}

// Two columns (log m, log a_m) plus the fitted line's endpoints as comments.
inline void write_plot_data(const RunTrace& trace, const ExperimentReport& rep, std::size_t fit_lo,
                            std::size_t fit_hi, std::ostream& os) {
  using detail::cell;
  if (!trace.reference) return;
  const auto a = trace.excess();
  os << "# log_m log_a_m\n";
  for (std::size_t m = 1; m < a.size(); ++m) {
    if (a[m] > 0.0) os << cell(std::log(static_cast<double>(m))) << " " << cell(std::log(a[m])) << "\n";
  }
  if (rep.fit) {
    const std::size_t hi = std::min(fit_hi, a.size() - 1);
    for (std::size_t m : {fit_lo, hi}) {
      const double lm = std::log(static_cast<double>(m));
      os << "# fit " << cell(lm) << " " << cell(rep.fit->intercept + rep.fit->slope * lm) << "\n";
    }
  }
}

inline nlohmann::json report_json(const ExperimentReport& r) {
  nlohmann::json j;
  auto opt = [](const auto& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j["config_hash"] = r.config_hash;
  j["algorithm"] = to_string(r.algorithm);
  j["slope"] = r.fit ? nlohmann::json(r.fit->slope) : nlohmann::json(nullptr);
  j["slope_residual"] = r.fit ? nlohmann::json(r.fit->residual) : nlohmann::json(nullptr);
  j["majorant_ok"] = opt(r.majorant_ok);
  j["certificate_ok"] = opt(r.certificate_ok);
  j["iterations"] = r.iterations;
  j["aborted"] = r.aborted;
  j["wall_ms"] = r.wall_ms;
  if (r.fit_error) j["fit_error"] = *r.fit_error;
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  if (r.trace.reference) {
    j["reference"] = r.trace.reference->value;
    j["reference_source"] = to_string(r.trace.reference->source);
  }
  return j;
}

// Runs one experiment; writes <hash>.trace.csv, <hash>.report.json and
// <hash>.plot.dat into out_dir when it is nonempty. Search failures are
// reported through `aborted` with the partial trace persisted.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {}) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config_hash = config_hash(cfg);
  rep.algorithm = cfg.algorithm;

  const ConvexObjective obj = build_objective(cfg);
  const Dictionary dict = build_dictionary(cfg);
  const AlgorithmConfig acfg = cfg.algorithm_config();
  std::optional<Reference> ref = resolve_reference(cfg, obj, dict);

  try {
    rep.trace = run(obj, dict, acfg, ref);
  } catch (const RunAborted& e) {
    rep.trace = e.partial_trace();
    rep.aborted = true;
    rep.abort_reason = e.what();
  }
  rep.iterations = rep.trace.iterations();

  if (rep.trace.reference) {
    try {
      rep.fit = fit_rate_exponent(rep.trace.excess(), cfg.fit_lo, cfg.fit_hi);
    } catch (const InvalidArgument& e) {
      rep.fit_error = e.what();
    }
  }

  if (const auto& cert = obj.smoothness(); cert && !cfg.modulus_u.empty() && cfg.modulus_samples > 0) {
    const ModulusEstimate est = estimate_modulus(obj, certificate_sampler(cfg, obj, dict), cfg.modulus_u,
                                                 cfg.modulus_samples, NormKind(cfg.norm_p), cfg.seed);
    rep.certificate_ok = check_certificate(est, *cert).ok;
  }

  if (cfg.majorant && rep.trace.reference && obj.smoothness() && !rep.aborted) {
    if (!uses_free_relaxation(cfg.algorithm)) {
      rep.majorant_ok = check_majorant_domination(rep.trace, relaxed_majorant_params(rep.trace, *obj.smoothness(), acfg)).ok;
    } else if (auto k = free_relaxation_constants(cfg, dict)) {
      const MajorantParams p = free_majorant_params(rep.trace, *obj.smoothness(), acfg, k->first, k->second);
      rep.majorant_ok = check_majorant_domination(rep.trace, p, true).ok;
    }
  }

  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    {
      std::ofstream csv(out_dir / (rep.config_hash + ".trace.csv"), std::ios::binary);
      write_trace_csv(rep.trace, csv);
    }
    {
      std::ofstream js(out_dir / (rep.config_hash + ".report.json"), std::ios::binary);
      js << report_json(rep).dump(2) << "\n";
    }
    if (rep.trace.reference) {
      std::ofstream plot(out_dir / (rep.config_hash + ".plot.dat"), std::ios::binary);
      write_plot_data(rep.trace, rep, cfg.fit_lo, cfg.fit_hi, plot);
    }
  }
  return rep;
}

// Exit codes shared by the CLI.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitCheckFailed = 3 };

struct SuiteRow {
  std::string config_file;
  std::string config_hash;
  std::string algorithm;
  std::optional<double> q;
  std::string delta_mode;
  std::optional<double> slope;
  std::optional<bool> majorant_ok;
  std::string status;  // ok | check-failed | config-error | numerical-error
  std::string message;
  double wall_ms = 0.0;
};

inline const char* kSuiteHeader = "config_file,config_hash,algorithm,q,delta_mode,slope,majorant_ok,status,message,wall_ms";

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline SuiteRow run_suite_entry(const std::filesystem::path& file, const std::filesystem::path& out_dir) {
  SuiteRow row;
  row.config_file = file.filename().string();
  try {
    const ExperimentConfig cfg = parse_config(file);
    row.config_hash = config_hash(cfg);
    row.algorithm = to_string(cfg.algorithm);
    const ConvexObjective obj = build_objective(cfg);
    if (obj.smoothness()) row.q = obj.smoothness()->q();
    row.delta_mode = std::string(to_string(cfg.schedule.kind())) + "/" + to_string(cfg.error_mode);
    const ExperimentReport rep = run_experiment(cfg, out_dir);
    if (rep.fit) row.slope = rep.fit->slope;
    row.majorant_ok = rep.majorant_ok;
    row.wall_ms = rep.wall_ms;
    if (rep.aborted) {
      row.status = "numerical-error";
      row.message = rep.abort_reason;
    } else {
      row.status = rep.checks_passed() ? "ok" : "check-failed";
    }
  } catch (const ConfigError& e) {
    row.status = "config-error";
    row.message = e.what();
  } catch (const InvalidArgument& e) {
    row.status = "config-error";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "numerical-error";
    row.message = e.what();
  }
  return row;
}

}  // namespace detail

struct SuiteSummary {
  std::vector<SuiteRow> rows;

  int exit_code() const {
    auto any = [&](const char* s) {
      return std::any_of(rows.begin(), rows.end(), [s](const SuiteRow& r) { return r.status == s; });
    };
    if (any("config-error")) return kExitConfig;
    if (any("numerical-error")) return kExitNumerical;
    if (any("check-failed")) return kExitCheckFailed;
    return kExitOk;
  }
};

inline void write_suite_csv(const SuiteSummary& s, std::ostream& os) {
  using detail::cell;
  os << kSuiteHeader << "\n";
  for (const auto& r : s.rows) {
    os << detail::csv_escape(r.config_file) << "," << r.config_hash << "," << r.algorithm << ","
       << (r.q ? cell(*r.q) : "") << "," << r.delta_mode << "," << (r.slope ? cell(*r.slope) : "") << ","
       << (r.majorant_ok ? (*r.majorant_ok ? "true" : "false") : "") << "," << r.status << ","
       << detail::csv_escape(r.message) << "," << cell(r.wall_ms) << "\n";
  }
}

// Every *.ini / *.cfg file in `dir`, in name order, `jobs` at a time.
inline SuiteSummary run_suite(const std::filesystem::path& dir, const std::filesystem::path& out_dir,
                              unsigned jobs = 1) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string(), "not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".ini" || ext == ".cfg")) files.push_back(e.path());
  }
  if (files.empty()) throw ConfigError(dir.string(), "suite directory contains no configs");
  std::sort(files.begin(), files.end());

  SuiteSummary summary;
  summary.rows.resize(files.size());
  jobs = std::max(1u, jobs);
  for (std::size_t begin = 0; begin < files.size(); begin += jobs) {
    std::vector<std::future<SuiteRow>> batch;
    const std::size_t end = std::min(files.size(), begin + jobs);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, detail::run_suite_entry, files[i], out_dir));
    }
    for (std::size_t i = begin; i < end; ++i) summary.rows[i] = batch[i - begin].get();
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "summary.csv", std::ios::binary);
    write_suite_csv(summary, csv);
  }
  return summary;
}

}  // namespace greedy::harness
