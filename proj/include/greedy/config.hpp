#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "greedy/error.hpp"

namespace greedy {

enum class Algorithm { kWRGA, kREGA, kWGAFR, kEGAFR };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kWRGA: return "WRGA";
    case Algorithm::kREGA: return "REGA";
    case Algorithm::kWGAFR: return "WGAFR";
    case Algorithm::kEGAFR: return "EGAFR";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "WRGA" || s == "wrga") return Algorithm::kWRGA;
  if (s == "REGA" || s == "rega") return Algorithm::kREGA;
  if (s == "WGAFR" || s == "wgafr") return Algorithm::kWGAFR;
  if (s == "EGAFR" || s == "egafr") return Algorithm::kEGAFR;
  throw InvalidArgument("unknown algorithm '" + std::string(s) + "'");
}

// Free-relaxation algorithms update with (1-w)G + lambda*phi.
inline bool uses_free_relaxation(Algorithm a) {
  return a == Algorithm::kWGAFR || a == Algorithm::kEGAFR;
}

inline bool needs_gradient(Algorithm a) { return a == Algorithm::kWRGA || a == Algorithm::kWGAFR; }

// How the step slack delta_{m-1} is spent.
enum class ErrorMode {
  kTolerance,  // the search itself stops once its certified gap is within delta
  kInject,     // exact search, then a seeded perturbation worth up to delta
};

inline const char* to_string(ErrorMode m) { return m == ErrorMode::kTolerance ? "tolerance" : "inject"; }

inline ErrorMode parse_error_mode(std::string_view s) {
  if (s == "tolerance") return ErrorMode::kTolerance;
  if (s == "inject") return ErrorMode::kInject;
  throw InvalidArgument("unknown error mode '" + std::string(s) + "'");
}

// Error sequence delta_k, k = 0, 1, 2, ...
class ErrorSchedule {
 public:
  enum class Kind {
    kZero,
    kConstant,  // delta
    kPower,     // c (k+1)^{-q}
    kHarmonic,  // c / (k+2)
  };

  static ErrorSchedule zero() { return ErrorSchedule(Kind::kZero, 0.0, 0.0); }
  static ErrorSchedule constant(double delta) { return ErrorSchedule(Kind::kConstant, delta, 0.0); }
  static ErrorSchedule power(double c, double q) { return ErrorSchedule(Kind::kPower, c, q); }
  static ErrorSchedule harmonic(double c) { return ErrorSchedule(Kind::kHarmonic, c, 0.0); }

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double q() const noexcept { return q_; }
  bool is_zero() const noexcept { return kind_ == Kind::kZero || c_ == 0.0; }

  double operator()(std::size_t k) const {
    const double kk = static_cast<double>(k);
    switch (kind_) {
      case Kind::kZero: return 0.0;
      case Kind::kConstant: return c_;
      case Kind::kPower: return c_ * std::pow(kk + 1.0, -q_);
      case Kind::kHarmonic: return c_ / (kk + 2.0);
    }
    return 0.0;
  }

  friend bool operator==(const ErrorSchedule&, const ErrorSchedule&) = default;

 private:
  ErrorSchedule(Kind kind, double c, double q) : kind_(kind), c_(c), q_(q) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidArgument("delta_k must be in [0,1]: negative scale");
    // every schedule is nonincreasing in k, so delta_0 bounds them all
    if ((*this)(0) > 1.0) throw InvalidArgument("delta_k must be in [0,1]");
    if (kind == Kind::kPower && !(q > 0.0)) throw InvalidArgument("power schedule exponent must be > 0");
  }

  Kind kind_;
  double c_;
  double q_;
};

inline const char* to_string(ErrorSchedule::Kind k) {
  switch (k) {
    case ErrorSchedule::Kind::kZero: return "zero";
    case ErrorSchedule::Kind::kConstant: return "constant";
    case ErrorSchedule::Kind::kPower: return "power";
    case ErrorSchedule::Kind::kHarmonic: return "harmonic";
  }
  return "?";
}

// Weakness sequence t_m in (0, 1], m = 1, 2, ...
class WeaknessSequence {
 public:
  static WeaknessSequence constant(double t) {
    check(t);
    return WeaknessSequence([t](std::size_t) { return t; }, t);
  }

  // Arbitrary t_m; each value is range-checked when requested.
  static WeaknessSequence from_function(std::function<double(std::size_t)> fn) {
    return WeaknessSequence(std::move(fn), std::nan(""));
  }

  double operator()(std::size_t m) const {
    const double t = fn_(m);
    check(t);
    return t;
  }

  bool is_constant() const noexcept { return !std::isnan(constant_); }
  double constant_value() const noexcept { return constant_; }

 private:
  WeaknessSequence(std::function<double(std::size_t)> fn, double constant)
      : fn_(std::move(fn)), constant_(constant) {}

  static void check(double t) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("t must be in (0,1]");
  }

  std::function<double(std::size_t)> fn_;
  double constant_;
};

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::kWRGA;
  WeaknessSequence weakness = WeaknessSequence::constant(1.0);
  ErrorSchedule errors = ErrorSchedule::zero();
  ErrorMode error_mode = ErrorMode::kTolerance;
  std::size_t max_iterations = 100;
  double w_max = 4.0;  // initial half-width of the (w, lambda) box
  std::uint64_t seed = 0;

  void validate() const {
    if (!(w_max >= 1.0) || !std::isfinite(w_max)) throw InvalidArgument("wgafr.wmax must be >= 1");
  }
};

}  // namespace greedy
