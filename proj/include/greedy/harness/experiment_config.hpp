#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "greedy/config.hpp"
#include "greedy/objective.hpp"
#include "greedy/vector.hpp"

namespace greedy::harness {

// A config error that names the offending key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key, const std::string& what) : InvalidArgument(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class DictionaryKind { kCanonical, kRandom };
enum class ReferenceMode { kAnalytic, kBruteForce, kNone };

inline const char* to_string(DictionaryKind k) { return k == DictionaryKind::kCanonical ? "canonical" : "random"; }

inline const char* to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::kAnalytic: return "analytic";
    case ReferenceMode::kBruteForce: return "brute-force";
    case ReferenceMode::kNone: return "none";
  }
  return "?";
}

// One experiment = one config file.
struct ExperimentConfig {
  ObjectiveKind objective = ObjectiveKind::kQuadratic;
  Vector f;                 // quadratic, p-power
  double power = 2.0;       // p-power exponent
  Eigen::MatrixXd a;        // log-sum-exp rows
  Vector b;                 // log-sum-exp offsets

  DictionaryKind dictionary = DictionaryKind::kCanonical;
  std::size_t dictionary_count = 0;
  std::uint64_t dictionary_seed = 0;
  double norm_p = 2.0;

  Algorithm algorithm = Algorithm::kWRGA;
  double t = 1.0;
  ErrorSchedule schedule = ErrorSchedule::zero();
  ErrorMode error_mode = ErrorMode::kTolerance;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  double w_max = 4.0;

  ReferenceMode reference = ReferenceMode::kNone;
  std::optional<double> reference_value;

  std::size_t fit_lo = 10;
  std::size_t fit_hi = 1000;
  bool majorant = true;
  std::optional<double> c0;
  std::optional<double> a_eps;
  std::vector<double> modulus_u{0.01, 0.03, 0.1, 0.3, 1.0};
  std::size_t modulus_samples = 200;

  Eigen::Index dimension() const {
    return objective == ObjectiveKind::kLogSumExp ? a.cols() : f.size();
  }

  AlgorithmConfig algorithm_config() const {
    AlgorithmConfig c;
    c.algorithm = algorithm;
    c.weakness = WeaknessSequence::constant(t);
    c.errors = schedule;
    c.error_mode = error_mode;
    c.max_iterations = max_iterations;
    c.w_max = w_max;
    c.seed = seed;
    return c;
  }

  friend bool operator==(const ExperimentConfig& x, const ExperimentConfig& y) {
    auto same_vec = [](const Vector& u, const Vector& v) { return u.size() == v.size() && u == v; };
    auto same_mat = [](const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
      return u.rows() == v.rows() && u.cols() == v.cols() && u == v;
    };
    return x.objective == y.objective && same_vec(x.f, y.f) && x.power == y.power && same_mat(x.a, y.a) &&
           same_vec(x.b, y.b) && x.dictionary == y.dictionary && x.dictionary_count == y.dictionary_count &&
           x.dictionary_seed == y.dictionary_seed && x.norm_p == y.norm_p && x.algorithm == y.algorithm &&
           x.t == y.t && x.schedule == y.schedule && x.error_mode == y.error_mode &&
           x.max_iterations == y.max_iterations && x.seed == y.seed && x.w_max == y.w_max &&
           x.reference == y.reference && x.reference_value == y.reference_value && x.fit_lo == y.fit_lo &&
           x.fit_hi == y.fit_hi && x.majorant == y.majorant && x.c0 == y.c0 && x.a_eps == y.a_eps &&
           x.modulus_u == y.modulus_u && x.modulus_samples == y.modulus_samples;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  std::string s(text);
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(std::string_view(s).substr(start, comma == std::string::npos ? s.npos : comma - start));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// rows separated by ';', entries by ','
inline Eigen::MatrixXd parse_matrix(const std::string& key, std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::string s(text);
  std::size_t start = 0;
  for (;;) {
    const auto semi = s.find(';', start);
    const std::string row = trim(std::string_view(s).substr(start, semi == std::string::npos ? s.npos : semi - start));
    if (!row.empty()) rows.push_back(parse_list(key, row));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  if (rows.empty()) throw ConfigError(key, "empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ConfigError(key, "ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// Shortest round-trip representation.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_list(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "objective.kind",   "objective.f",        "objective.power",   "objective.a",     "objective.b",
      "dictionary.kind",  "dictionary.count",   "dictionary.seed",   "norm.p",          "algorithm.name",
      "algorithm.t",      "schedule.kind",      "schedule.c",        "schedule.q",      "schedule.delta",
      "error.mode",       "run.max_iterations", "run.seed",          "bref.mode",       "bref.value",
      "analysis.fit_lo",  "analysis.fit_hi",    "analysis.majorant", "analysis.c0",     "analysis.a_eps",
      "analysis.modulus_u", "analysis.modulus_samples", "wgafr.wmax"};
  return keys;
}

// Parses and validates the flat key-value text (INI sections). Unknown keys are errors.
inline ExperimentConfig parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("<file>", std::string("malformed config: ") + e.message() + " (line " +
                                    std::to_string(e.line()) + ")");
  }

  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "keys must live in a [section]");
    for (const auto& [key, value] : body) kv[section + "." + key] = value.data();
  }
  const auto& known = known_keys();
  for (const auto& [key, _] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, "unknown key");
  }
  std::set<std::string> used;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    used.insert(key);
    return detail::trim(it->second);
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(key, "missing required key");
    return *v;
  };

  ExperimentConfig c;

  const std::string kind = require("objective.kind");
  if (kind == "quadratic") {
    c.objective = ObjectiveKind::kQuadratic;
    c.f = detail::to_vector(detail::parse_list("objective.f", require("objective.f")));
  } else if (kind == "p-power") {
    c.objective = ObjectiveKind::kPPower;
    c.f = detail::to_vector(detail::parse_list("objective.f", require("objective.f")));
    c.power = detail::parse_double("objective.power", require("objective.power"));
    if (!(c.power > 1.0 && c.power <= 2.0)) throw ConfigError("objective.power", "exponent must be in (1,2]");
  } else if (kind == "log-sum-exp") {
    c.objective = ObjectiveKind::kLogSumExp;
    c.a = detail::parse_matrix("objective.a", require("objective.a"));
    c.b = detail::to_vector(detail::parse_list("objective.b", require("objective.b")));
    if (c.b.size() != c.a.rows()) throw ConfigError("objective.b", "needs one offset per row of objective.a");
  } else {
    throw ConfigError("objective.kind", "expected quadratic | p-power | log-sum-exp, got '" + kind + "'");
  }
  if (c.objective != ObjectiveKind::kLogSumExp && !c.f.allFinite()) throw ConfigError("objective.f", "non-finite entry");

  const std::string dict = get("dictionary.kind").value_or("canonical");
  if (dict == "canonical") {
    c.dictionary = DictionaryKind::kCanonical;
  } else if (dict == "random") {
    c.dictionary = DictionaryKind::kRandom;
    c.dictionary_count = detail::parse_uint("dictionary.count", require("dictionary.count"));
    if (c.dictionary_count < 2 || c.dictionary_count % 2) {
      throw ConfigError("dictionary.count", "must be even and >= 2");
    }
    c.dictionary_seed = detail::parse_uint("dictionary.seed", get("dictionary.seed").value_or("0"));
  } else {
    throw ConfigError("dictionary.kind", "expected canonical | random, got '" + dict + "'");
  }

  if (auto p = get("norm.p")) {
    c.norm_p = detail::parse_double("norm.p", *p);
    if (!(c.norm_p >= 1.0)) throw ConfigError("norm.p", "p must be in [1, inf]");
  }

  try {
    c.algorithm = parse_algorithm(require("algorithm.name"));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("algorithm.name", e.what());
  }
  if (auto t = get("algorithm.t")) c.t = detail::parse_double("algorithm.t", *t);
  if (!(c.t > 0.0 && c.t <= 1.0)) throw ConfigError("algorithm.t", "t must be in (0,1]");

  const std::string sched = get("schedule.kind").value_or("zero");
  try {
    if (sched == "zero") {
      c.schedule = ErrorSchedule::zero();
    } else if (sched == "constant") {
      c.schedule = ErrorSchedule::constant(detail::parse_double("schedule.delta", require("schedule.delta")));
    } else if (sched == "power") {
      c.schedule = ErrorSchedule::power(detail::parse_double("schedule.c", require("schedule.c")),
                                        detail::parse_double("schedule.q", require("schedule.q")));
    } else if (sched == "harmonic") {
      c.schedule = ErrorSchedule::harmonic(detail::parse_double("schedule.c", require("schedule.c")));
    } else {
      throw ConfigError("schedule.kind", "expected zero | constant | power | harmonic, got '" + sched + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("schedule", e.what());
  }

  if (auto m = get("error.mode")) {
    try {
      c.error_mode = parse_error_mode(*m);
    } catch (const InvalidArgument& e) {
      throw ConfigError("error.mode", e.what());
    }
  }
  if (auto m = get("run.max_iterations")) c.max_iterations = detail::parse_uint("run.max_iterations", *m);
  if (auto s = get("run.seed")) c.seed = detail::parse_uint("run.seed", *s);
  if (auto w = get("wgafr.wmax")) {
    c.w_max = detail::parse_double("wgafr.wmax", *w);
    if (!(c.w_max >= 1.0) || std::isinf(c.w_max)) throw ConfigError("wgafr.wmax", "W_max must be a finite number >= 1");
  }

  const std::string bref = get("bref.mode").value_or("none");
  if (bref == "analytic") {
    c.reference = ReferenceMode::kAnalytic;
  } else if (bref == "brute-force") {
    c.reference = ReferenceMode::kBruteForce;
  } else if (bref == "none") {
    c.reference = ReferenceMode::kNone;
  } else {
    throw ConfigError("bref.mode", "expected analytic | brute-force | none, got '" + bref + "'");
  }
  if (auto v = get("bref.value")) {
    if (c.reference != ReferenceMode::kAnalytic) throw ConfigError("bref.value", "only valid with bref.mode = analytic");
    c.reference_value = detail::parse_double("bref.value", *v);
  }
  if (c.reference == ReferenceMode::kBruteForce && c.dimension() > 3) {
    throw ConfigError("bref.mode", "brute-force reference is limited to n <= 3");
  }

  if (auto v = get("analysis.fit_lo")) c.fit_lo = detail::parse_uint("analysis.fit_lo", *v);
  if (auto v = get("analysis.fit_hi")) c.fit_hi = detail::parse_uint("analysis.fit_hi", *v);
  if (c.fit_lo < 1 || c.fit_hi < c.fit_lo) throw ConfigError("analysis.fit_lo", "need 1 <= fit_lo <= fit_hi");
  if (auto v = get("analysis.majorant")) {
    if (*v == "on" || *v == "true") {
      c.majorant = true;
    } else if (*v == "off" || *v == "false") {
      c.majorant = false;
    } else {
      throw ConfigError("analysis.majorant", "expected on | off");
    }
  }
  if (auto v = get("analysis.c0")) {
    c.c0 = detail::parse_double("analysis.c0", *v);
    if (!(*c.c0 > 0.0)) throw ConfigError("analysis.c0", "C0 must be > 0");
  }
  if (auto v = get("analysis.a_eps")) {
    c.a_eps = detail::parse_double("analysis.a_eps", *v);
    if (!(*c.a_eps >= 1.0)) throw ConfigError("analysis.a_eps", "A(eps) must be >= 1");
  }
  if (auto v = get("analysis.modulus_u")) {
    c.modulus_u = detail::parse_list("analysis.modulus_u", *v);
    for (double u : c.modulus_u) {
      if (!(u > 0.0)) throw ConfigError("analysis.modulus_u", "grid values must be > 0");
    }
  }
  if (auto v = get("analysis.modulus_samples")) c.modulus_samples = detail::parse_uint("analysis.modulus_samples", *v);

  for (const auto& [key, _] : kv) {
    if (!used.count(key)) throw ConfigError(key, "not used by the selected kinds");
  }
  return c;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// Canonical text: fixed section and key order, shortest round-trip numbers.
inline std::string serialize_config(const ExperimentConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  os << "[objective]\n";
  os << "kind = " << to_string(c.objective) << "\n";
  if (c.objective == ObjectiveKind::kLogSumExp) {
    os << "a = ";
    for (Eigen::Index i = 0; i < c.a.rows(); ++i) {
      if (i) os << "; ";
      os << detail::format_list(c.a.row(i).transpose());
    }
    os << "\n";
    os << "b = " << detail::format_list(c.b) << "\n";
  } else {
    os << "f = " << detail::format_list(c.f) << "\n";
    if (c.objective == ObjectiveKind::kPPower) os << "power = " << format_double(c.power) << "\n";
  }
  os << "\n[dictionary]\nkind = " << to_string(c.dictionary) << "\n";
  if (c.dictionary == DictionaryKind::kRandom) {
    os << "count = " << c.dictionary_count << "\nseed = " << c.dictionary_seed << "\n";
  }
  os << "\n[norm]\np = " << format_double(c.norm_p) << "\n";
  os << "\n[algorithm]\nname = " << to_string(c.algorithm) << "\nt = " << format_double(c.t) << "\n";
  os << "\n[schedule]\nkind = " << to_string(c.schedule.kind()) << "\n";
  switch (c.schedule.kind()) {
    case ErrorSchedule::Kind::kZero: break;
    case ErrorSchedule::Kind::kConstant: os << "delta = " << format_double(c.schedule.c()) << "\n"; break;
    case ErrorSchedule::Kind::kPower:
      os << "c = " << format_double(c.schedule.c()) << "\nq = " << format_double(c.schedule.q()) << "\n";
      break;
    case ErrorSchedule::Kind::kHarmonic: os << "c = " << format_double(c.schedule.c()) << "\n"; break;
  }
  os << "\n[error]\nmode = " << to_string(c.error_mode) << "\n";
  os << "\n[run]\nmax_iterations = " << c.max_iterations << "\nseed = " << c.seed << "\n";
  os << "\n[wgafr]\nwmax = " << format_double(c.w_max) << "\n";
  os << "\n[bref]\nmode = " << to_string(c.reference) << "\n";
  if (c.reference_value) os << "value = " << format_double(*c.reference_value) << "\n";
  os << "\n[analysis]\nfit_lo = " << c.fit_lo << "\nfit_hi = " << c.fit_hi << "\n";
  os << "majorant = " << (c.majorant ? "on" : "off") << "\n";
  if (c.c0) os << "c0 = " << format_double(*c.c0) << "\n";
  if (c.a_eps) os << "a_eps = " << format_double(*c.a_eps) << "\n";
  os << "modulus_u = " << detail::format_list(detail::to_vector(c.modulus_u)) << "\n";
  os << "modulus_samples = " << c.modulus_samples << "\n";
  return os.str();
}

// FNV-1a over the canonical serialization, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace greedy::harness
