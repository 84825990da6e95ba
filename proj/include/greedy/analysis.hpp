#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "greedy/config.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/objective.hpp"
#include "greedy/trace.hpp"

namespace greedy {

// ---------------------------------------------------------------------------
// Modulus of smoothness
// ---------------------------------------------------------------------------

// Draws points of a set S; every draw must satisfy E(x) <= level.
struct DomainSampler {
  std::function<Vector(std::mt19937_64&)> draw;
  double level = 0.0;
  std::string descriptor;
};

// Random points of radius * A1(D) restricted to {E <= E(0) + slack}.
// slack = 0 gives D ∩ A1(D); slack = 1 with a larger radius covers part of D1.
inline DomainSampler sublevel_sampler(const ConvexObjective& E, const Dictionary& dict, double slack,
                                      double radius = 1.0) {
  const double level = E(Vector::Zero(dict.dimension())) + slack;
  auto draw = [&E, &dict, level, radius](std::mt19937_64& rng) -> Vector {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, dict.size() - 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const int terms = 1 + static_cast<int>(unit(rng) * 3.0);
      Vector x = Vector::Zero(dict.dimension());
      std::vector<double> w(terms);
      double total = 0.0;
      for (double& wi : w) total += (wi = -std::log(1.0 - unit(rng)));
      for (double wi : w) x += (wi / total) * dict[pick(rng)];
      x *= radius * unit(rng);
      if (E(x) <= level) return x;
    }
    return Vector::Zero(dict.dimension());
  };
  const std::string tag = slack == 0.0 ? "D∩A1" : "D1";
  return {draw, level, tag + "(radius=" + std::to_string(radius) + ")"};
}

struct ModulusEstimate {
  std::vector<double> u;
  std::vector<double> rho;  // lower bounds on rho(E, S, u)
  std::size_t samples = 0;
  std::string sampler;
};

// rho(E,S,u) = 1/2 sup_{x in S, ||y|| = 1} |E(x+uy) + E(x-uy) - 2E(x)|, estimated
// from below on a shared set of (x, y) draws so that the estimate is
// nondecreasing in u and in the number of draws.
inline ModulusEstimate estimate_modulus(const ConvexObjective& E, const DomainSampler& sampler,
                                        const std::vector<double>& u_grid, std::size_t directions_per_u,
                                        NormKind norm, std::uint64_t seed) {
  if (u_grid.empty()) throw InvalidArgument("empty u grid");
  for (double u : u_grid) {
    if (!(u > 0.0) || !std::isfinite(u)) throw InvalidArgument("u grid must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ModulusEstimate est;
  est.u = u_grid;
  est.rho.assign(u_grid.size(), 0.0);
  est.samples = directions_per_u;
  est.sampler = sampler.descriptor;
  const Eigen::Index n = E.dimension();
  for (std::size_t s = 0; s < directions_per_u; ++s) {
    const Vector x = sampler.draw(rng);
    const double ex = E(x);
    if (!(ex <= sampler.level + 1e-12)) {
      throw InvalidArgument("sampler produced a point outside the declared domain (E(x) = " +
                            std::to_string(ex) + " > " + std::to_string(sampler.level) + ")");
    }
    Vector y(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) y[i] = gauss(rng);
    } while (y.norm() < 1e-12);
    y = norm.normalize(y);
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      const double u = u_grid[k];
      const double second = std::abs(E(x + u * y) + E(x - u * y) - 2.0 * ex);
      est.rho[k] = std::max(est.rho[k], 0.5 * second);
    }
  }
  return est;
}

struct CertificateReport {
  bool ok = true;
  double max_ratio = 0.0;  // max_u estimate(u) / (gamma u^q)
  std::vector<std::size_t> failures;
};

inline CertificateReport check_certificate(const ModulusEstimate& est, const SmoothnessCertificate& cert) {
  if (est.u.empty()) throw InvalidArgument("empty modulus estimate");
  CertificateReport rep;
  for (std::size_t k = 0; k < est.u.size(); ++k) {
    const double bound = cert.bound(est.u[k]);
    rep.max_ratio = std::max(rep.max_ratio, est.rho[k] / bound);
    if (est.rho[k] > bound + 1e-9) {
      rep.ok = false;
      rep.failures.push_back(k);
    }
  }
  return rep;
}

// Largest violation of "rho nondecreasing" and "rho(u)/u nondecreasing" on the grid.
inline double modulus_shape_violation(const ModulusEstimate& est) {
  std::vector<std::size_t> order(est.u.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return est.u[a] < est.u[b]; });
  double worst = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto i = order[k - 1], j = order[k];
    worst = std::max(worst, est.rho[i] - est.rho[j]);
    worst = std::max(worst, est.rho[i] / est.u[i] - est.rho[j] / est.u[j]);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Majorant recurrences
// ---------------------------------------------------------------------------

// Extremal sequence of a_m <= a_{m-1} + inf_{0<=l<=1}(-l v a_{m-1} + B l^q) + delta_{m-1}.
struct MajorantParams {
  double v = 1.0;
  double B = 1.0;
  double q = 2.0;
  ErrorSchedule delta = ErrorSchedule::zero();
  double a0 = 0.0;

  void validate() const {
    if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("majorant v must be in (0,1]");
    if (!(B > 0.0) || !std::isfinite(B)) throw InvalidArgument("majorant B must be > 0");
    if (!(q > 1.0 && q <= 2.0)) throw InvalidArgument("majorant q must be in (1,2]");
    if (!(a0 >= 0.0) || !std::isfinite(a0)) throw InvalidArgument("majorant a0 must be >= 0");
  }
};

// inf over lambda in [0,1] of (-lambda v a + B lambda^q), in closed form.
inline double majorant_inner(double a, double v, double B, double q) {
  if (a <= 0.0) return 0.0;
  const double lambda = std::min(1.0, std::pow(v * a / (q * B), 1.0 / (q - 1.0)));
  return -lambda * v * a + B * std::pow(lambda, q);
}

inline double majorant_step(double a, const MajorantParams& p, double delta) {
  return a + majorant_inner(a, p.v, p.B, p.q) + delta;
}

inline std::vector<double> majorant_sequence(const MajorantParams& params, std::size_t m_max) {
  params.validate();
  std::vector<double> a{params.a0};
  a.reserve(m_max + 1);
  for (std::size_t m = 1; m <= m_max; ++m) a.push_back(majorant_step(a.back(), params, params.delta(m - 1)));
  return a;
}

struct DominationReport {
  bool ok = true;
  std::optional<std::size_t> first_violation;
  double max_excess = -std::numeric_limits<double>::infinity();  // max_m (trace - majorant)
};

// Pointwise a_m <= majorant_m + 1e-9. `clamp_at_zero` uses max(E - b, 0), as
// for the free-relaxation bound where b is the value at a comparison point.
inline DominationReport check_majorant_domination(const RunTrace& trace, const MajorantParams& params,
                                                  bool clamp_at_zero = false) {
  if (!trace.reference) throw InvalidArgument("majorant check needs a reference value b");
  std::vector<double> a = trace.excess();
  if (clamp_at_zero) {
    for (double& x : a) x = std::max(x, 0.0);
  }
  const std::vector<double> major = majorant_sequence(params, a.size() - 1);
  DominationReport rep;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double excess = a[m] - major[m];
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 1e-9 && rep.ok) {
      rep.ok = false;
      rep.first_violation = m;
    }
  }
  return rep;
}

// v = t, B = 2^{1+q} gamma for the relaxed algorithms (v = 1 for REGA,
// whose joint step is at least as good as the exact greedy atom).
inline MajorantParams relaxed_majorant_params(const RunTrace& trace, const SmoothnessCertificate& cert,
                                              const AlgorithmConfig& cfg) {
  if (!trace.reference) throw InvalidArgument("majorant check needs a reference value b");
  if (!cfg.weakness.is_constant()) throw InvalidArgument("majorant check needs a constant weakness t");
  MajorantParams p;
  p.v = cfg.algorithm == Algorithm::kREGA ? 1.0 : cfg.weakness.constant_value();
  p.q = cert.q();
  p.B = std::pow(2.0, 1.0 + cert.q()) * cert.gamma();
  p.delta = cfg.errors;
  p.a0 = std::max(trace.initial_value - trace.reference->value, 0.0);
  return p;
}

// v = t / A(eps), B = 2 gamma C0^q for the free-relaxation algorithms.
inline MajorantParams free_majorant_params(const RunTrace& trace, const SmoothnessCertificate& cert,
                                           const AlgorithmConfig& cfg, double a_eps, double c0) {
  if (!trace.reference) throw InvalidArgument("majorant check needs a reference value b");
  if (!cfg.weakness.is_constant()) throw InvalidArgument("majorant check needs a constant weakness t");
  if (!(a_eps >= 1.0)) throw InvalidArgument("A(eps) must be >= 1");
  if (!(c0 > 0.0)) throw InvalidArgument("C0 must be > 0");
  MajorantParams p;
  p.v = (cfg.algorithm == Algorithm::kEGAFR ? 1.0 : cfg.weakness.constant_value()) / a_eps;
  p.q = cert.q();
  p.B = 2.0 * cert.gamma() * std::pow(c0, cert.q());
  p.delta = cfg.errors;
  p.a0 = std::max(trace.initial_value - trace.reference->value, 0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |log a_m - fit|
  std::size_t points = 0;
  bool no_decay = false;
};

// Least squares of log a_m against log m over m in [m_lo, m_hi]; nonpositive
// entries are dropped.
inline RateFit fit_rate_exponent(const std::vector<double>& a, std::size_t m_lo, std::size_t m_hi) {
  if (m_lo < 1) m_lo = 1;
  if (m_hi >= a.size()) m_hi = a.size() == 0 ? 0 : a.size() - 1;
  std::vector<double> xs, ys;
  for (std::size_t m = m_lo; m <= m_hi && m < a.size(); ++m) {
    if (a[m] > 0.0 && std::isfinite(a[m])) {
      xs.push_back(std::log(static_cast<double>(m)));
      ys.push_back(std::log(a[m]));
    }
  }
  if (xs.size() < 10) {
    throw InvalidArgument("degenerate fit window: " + std::to_string(xs.size()) +
                          " positive points in [" + std::to_string(m_lo) + ", " + std::to_string(m_hi) +
                          "], need at least 10");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  }
  fit.points = xs.size();
  fit.no_decay = fit.slope > -0.05;
  return fit;
}

// ---------------------------------------------------------------------------
// Perturbed decay sequences: a_n <= a_{n-1} + A n^{-alpha}, and
// a_{nu+1} <= a_nu (1 - beta/nu) whenever a_nu >= A nu^{-alpha}.
// ---------------------------------------------------------------------------

struct Lemma34Params {
  double alpha;
  double beta;
  double A;

  Lemma34Params(double alpha_, double beta_, double A_) : alpha(alpha_), beta(beta_), A(A_) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
    if (!(beta > alpha)) throw InvalidArgument("beta must exceed alpha");
    if (!(A > 0.0)) throw InvalidArgument("A must be > 0");
  }
};

// Proposes a_n from (n, a_{n-1}).
using Lemma34Generator = std::function<double(std::size_t n, double a_prev, const Lemma34Params&)>;

// Takes the largest value the two hypotheses allow at every step.
inline double lemma34_worst_case(std::size_t n, double a_prev, const Lemma34Params& p) {
  const double nu = static_cast<double>(n - 1);
  if (n >= 2 && a_prev >= p.A * std::pow(nu, -p.alpha)) return a_prev * (1.0 - p.beta / nu);
  return a_prev + p.A * std::pow(static_cast<double>(n), -p.alpha);
}

struct Lemma34Result {
  double C = 0.0;  // sup_n a_n n^alpha / A
  std::vector<double> sequence;
};

inline Lemma34Result lemma34_empirical_check(const Lemma34Params& p, double a0, const Lemma34Generator& gen,
                                             std::size_t n_max) {
  if (!(a0 < p.A)) throw InvalidArgument("requires a_0 < A");
  Lemma34Result out;
  out.sequence.reserve(n_max + 1);
  out.sequence.push_back(a0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double prev = out.sequence.back();
    const double next = gen(n, prev, p);
    const double tol = 1e-12 * (1.0 + std::abs(prev));
    const double nn = static_cast<double>(n);
    if (!std::isfinite(next) || next > prev + p.A * std::pow(nn, -p.alpha) + tol) {
      throw InvalidArgument("increment bound violated at step n = " + std::to_string(n));
    }
    const double nu = nn - 1.0;
    if (n >= 2 && prev >= p.A * std::pow(nu, -p.alpha) && next > prev * (1.0 - p.beta / nu) + tol) {
      throw InvalidArgument("contraction bound violated at step n = " + std::to_string(n));
    }
    out.sequence.push_back(next);
    out.C = std::max(out.C, next * std::pow(nn, p.alpha) / p.A);
  }
  return out;
}

// ---------------------------------------------------------------------------
// epsilon_m = inf { eps : A(eps)^q m^{1-q} <= eps } over sampled (eps, A(eps)).
// ---------------------------------------------------------------------------

inline std::optional<double> epsilon_m_bound(const std::vector<std::pair<double, double>>& samples, double q,
                                             std::size_t m) {
  if (samples.empty()) throw InvalidArgument("no (eps, A(eps)) samples");
  if (!(q > 1.0 && q <= 2.0)) throw InvalidArgument("q must be in (1,2]");
  if (m < 1) throw InvalidArgument("m must be >= 1");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].second < 1.0) throw InvalidArgument("A(eps) must be >= 1");
    if (i > 0 && samples[i].first < samples[i - 1].first) throw InvalidArgument("samples must be sorted by eps");
    if (i > 0 && samples[i].second > samples[i - 1].second) throw InvalidArgument("A(eps) must be nonincreasing");
  }
  const double mq = std::pow(static_cast<double>(m), 1.0 - q);
  for (const auto& [eps, A] : samples) {
    if (std::pow(A, q) * mq <= eps) return eps;
  }
  return std::nullopt;
}

}  // namespace greedy
