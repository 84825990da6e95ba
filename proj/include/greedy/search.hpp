#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "greedy/config.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/objective.hpp"

namespace greedy {

// Minimizer of one greedy step: lambda, plus w for free relaxation and the
// atom for joint searches. `gap` bounds value - (true minimum) from above.
struct SearchResult {
  double lambda = 0.0;
  std::optional<double> w;
  std::optional<std::size_t> atom;
  double value = 0.0;
  double gap = 0.0;
  std::size_t evaluations = 0;
  double box = 0.0;  // final (w, lambda) half-width, 2-D searches only
  double injected_error = 0.0;
  bool injection_flat = false;
};

struct AtomChoice {
  std::size_t index = 0;
  double score = 0.0;      // score of the chosen atom
  double max_score = 0.0;  // exact sup over the dictionary
  bool stationary = false;
};

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  double gap = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498948482;  // 1/golden ratio
inline constexpr double kMinBracket = 1e-14;

template <class F>
double checked_eval(F& f, double x, std::size_t& evals) {
  const double v = f(x);
  ++evals;
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite objective value at parameter " << x;
    throw NumericalError(os.str());
  }
  return v;
}

// Lower bound on min f over [a, b] for convex f sampled at a < c < d < b,
// using extensions of chords (a chord's extension underestimates f outside it).
inline double convex_bracket_lower_bound(double a, double c, double d, double b, double fa, double fc,
                                         double fd, double fb) {
  const double inf = std::numeric_limits<double>::infinity();
  double lb = std::min(fc, fd);
  if (d > c) {
    const double s = (fd - fc) / (d - c);
    lb = std::min({lb, fc + s * (a - c), fd + s * (b - d)});
  } else {
    lb = std::min({lb, fa, fb});
  }
  // middle piece: max of the outer chords' extensions
  auto left = [&](double x) { return c > a ? fc + (fc - fa) / (c - a) * (x - c) : -inf; };
  auto right = [&](double x) { return b > d ? fd + (fb - fd) / (b - d) * (x - d) : -inf; };
  double mid = std::min(std::max(left(c), right(c)), std::max(left(d), right(d)));
  if (c > a && b > d) {
    const double s1 = (fc - fa) / (c - a);
    const double s2 = (fb - fd) / (b - d);
    if (s1 != s2) {
      const double x = (fd - s2 * d - fc + s1 * c) / (s1 - s2);
      if (x > c && x < d) mid = std::min(mid, left(x));
    }
  }
  return std::min(lb, mid);
}

}  // namespace detail

// Golden-section minimization of a convex f on [lo, hi] with a certified gap.
// Stops when the gap is <= target_gap or the bracket is narrower than 1e-14.
// When `preferred` lies in [lo, hi] and ties the best sample it is returned,
// which keeps flat directions from drifting.
template <class F>
ScalarMinimum minimize_convex_1d(F&& f, double lo, double hi, double target_gap,
                                 std::optional<double> preferred = std::nullopt) {
  if (!(hi >= lo)) throw InvalidArgument("empty search interval");
  std::size_t evals = 0;
  double a = lo, b = hi;
  double c = b - detail::kInvPhi * (b - a);
  double d = a + detail::kInvPhi * (b - a);
  double fa = detail::checked_eval(f, a, evals);
  double fb = detail::checked_eval(f, b, evals);
  double fc = detail::checked_eval(f, c, evals);
  double fd = detail::checked_eval(f, d, evals);
  double lower = detail::convex_bracket_lower_bound(a, c, d, b, fa, fc, fd, fb);

  for (;;) {
    const double best = std::min({fa, fb, fc, fd});
    if (best - lower <= target_gap || b - a < detail::kMinBracket) break;
    if (fc <= fd) {
      b = d, fb = fd;
      d = c, fd = fc;
      c = b - detail::kInvPhi * (b - a);
      fc = detail::checked_eval(f, c, evals);
    } else {
      a = c, fa = fc;
      c = d, fc = fd;
      d = a + detail::kInvPhi * (b - a);
      fd = detail::checked_eval(f, d, evals);
    }
    // the bracket only shrinks, so earlier bounds stay valid
    lower = std::max(lower, detail::convex_bracket_lower_bound(a, c, d, b, fa, fc, fd, fb));
  }

  ScalarMinimum out{a, fa, 0.0, 0};
  auto consider = [&](double x, double v) {
    if (v < out.value) out.x = x, out.value = v;
  };
  consider(c, fc);
  consider(d, fd);
  consider(b, fb);
  if (preferred && *preferred >= lo && *preferred <= hi) {
    const double v = detail::checked_eval(f, *preferred, evals);
    if (v <= out.value) out.x = *preferred, out.value = v;
  }
  out.gap = std::max(0.0, out.value - lower);
  out.evaluations = evals;
  return out;
}

namespace detail {

inline AtomChoice weak_select(const std::vector<double>& scores, double t, double grad_norm) {
  if (scores.empty()) throw InvalidArgument("empty dictionary");
  if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("t must be in (0,1]");
  AtomChoice out;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[arg]) arg = i;
  }
  out.max_score = scores[arg];
  out.stationary = out.max_score < 1e-13 * (1.0 + grad_norm);
  if (t == 1.0) {
    out.index = arg;
  } else {
    const double threshold = t * out.max_score;
    out.index = arg;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= threshold) {
        out.index = i;
        break;
      }
    }
  }
  out.score = scores[out.index];
  return out;
}

}  // namespace detail

// Atom with <-E'(G), phi> >= t * sup_g <-E'(G), g>.
inline AtomChoice weak_argmax_frank_wolfe(const Vector& gradient, const Dictionary& dict, double t) {
  require_finite(gradient, "gradient");
  std::vector<double> scores(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) scores[i] = -gradient.dot(dict[i]);
  return detail::weak_select(scores, t, gradient.norm());
}

// Atom with <-E'(G), phi - G> >= t * sup_g <-E'(G), g - G>.
inline AtomChoice weak_argmax_relative(const Vector& gradient, const Vector& G, const Dictionary& dict,
                                       double t) {
  require_finite(gradient, "gradient");
  const double base = -gradient.dot(G);
  std::vector<double> scores(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) scores[i] = -gradient.dot(dict[i]) - base;
  return detail::weak_select(scores, t, gradient.norm());
}

// min over lambda in [0,1] of E((1-lambda) G + lambda phi).
inline SearchResult line_search_unit_interval(const ConvexObjective& E, const Vector& G, const Vector& phi,
                                              double target_gap) {
  Vector x(G.size());
  auto f = [&](double lambda) {
    x.noalias() = (1.0 - lambda) * G + lambda * phi;
    return E(x);
  };
  const ScalarMinimum r = minimize_convex_1d(f, 0.0, 1.0, target_gap, 0.0);
  SearchResult out;
  out.lambda = r.x;
  out.value = r.value;
  out.gap = r.gap;
  out.evaluations = r.evaluations;
  return out;
}

namespace detail {

// Interval of s keeping p + s*d inside [-W, W]^2.
inline std::pair<double, double> box_segment(double p0, double p1, double d0, double d1, double W) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  auto clip = [&](double p, double d) {
    if (d == 0.0) return;
    double s1 = (-W - p) / d, s2 = (W - p) / d;
    if (s1 > s2) std::swap(s1, s2);
    lo = std::max(lo, s1);
    hi = std::min(hi, s2);
  };
  clip(p0, d0);
  clip(p1, d1);
  return {lo, hi};
}

}  // namespace detail

namespace detail {

// Frank-Wolfe duality gap of F(w, lambda) = E((1-w) G + lambda phi) over
// [-W, W]^2 at (w, lambda): F - min over the box of its linearization.
inline double free_relaxation_fw_gap(const ConvexObjective& E, const Vector& x, const Vector& G,
                                     const Vector& phi, double w, double lambda, double W) {
  const Vector grad = E.gradient(x);
  const double gw = -grad.dot(G);
  const double gl = grad.dot(phi);
  return std::max(0.0, std::abs(gw) * W + gw * w + std::abs(gl) * W + gl * lambda);
}

}  // namespace detail

// min over (w, lambda) of E((1-w) G + lambda phi) on a box that doubles
// (at most 2^10 times) while the minimizer sits on its edge. With a gradient
// the reported gap is the Frank-Wolfe gap over the box; without one it is the
// sum of the final 1-D gaps plus the last sweep's improvement.
inline SearchResult free_relaxation_search(const ConvexObjective& E, const Vector& G, const Vector& phi,
                                           double target_gap, double w_max) {
  if (!(w_max >= 1.0)) throw InvalidArgument("W_max must be >= 1");
  Vector x(G.size());
  auto F = [&](double w, double lambda) {
    x.noalias() = (1.0 - w) * G + lambda * phi;
    return E(x);
  };

  constexpr int kMaxSweeps = 200;
  constexpr int kMaxGrowth = 10;
  const bool certified = E.has_gradient();
  double W = w_max;
  double w = 0.0, lambda = 0.0;
  std::size_t evals = 1;
  double value = F(w, lambda);
  if (!std::isfinite(value)) throw NumericalError("non-finite objective value at (w, lambda) = (0, 0)");
  double gap = 0.0;

  for (int growth = 0;; ++growth) {
    // loose 1-D searches can stall a certified run, so those go to full precision
    const double sub_target = certified ? 0.0 : target_gap / 4.0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const double w0 = w, l0 = lambda, v0 = value;

      const ScalarMinimum rl =
          minimize_convex_1d([&](double l) { return F(w, l); }, -W, W, sub_target, lambda);
      lambda = rl.x;
      const ScalarMinimum rw =
          minimize_convex_1d([&](double ww) { return F(ww, lambda); }, -W, W, sub_target, w);
      w = rw.x;
      value = rw.value;
      evals += rl.evaluations + rw.evaluations;

      // pattern move along this sweep's displacement
      double pattern_gap = 0.0;
      const double dw = w - w0, dl = lambda - l0;
      if (dw != 0.0 || dl != 0.0) {
        const auto [s_lo, s_hi] = detail::box_segment(w0, l0, dw, dl, W);
        const ScalarMinimum rp = minimize_convex_1d(
            [&](double s) { return F(w0 + s * dw, l0 + s * dl); }, s_lo, s_hi, sub_target, 1.0);
        evals += rp.evaluations;
        if (rp.value < value) {
          w = w0 + rp.x * dw;
          lambda = l0 + rp.x * dl;
          value = rp.value;
        }
        pattern_gap = rp.gap;
      }

      const double improvement = v0 - value;
      const double floor = 1e-15 * (1.0 + std::abs(value));
      const bool converged =
          improvement <= floor && rl.gap <= floor && rw.gap <= floor && pattern_gap <= floor;
      if (certified) {
        x.noalias() = (1.0 - w) * G + lambda * phi;
        gap = detail::free_relaxation_fw_gap(E, x, G, phi, w, lambda, W);
        if (gap <= target_gap || converged) break;
      } else {
        gap = rl.gap + rw.gap + pattern_gap + std::max(improvement, 0.0);
        const double tol = std::max(sub_target, floor);
        if (improvement <= tol && rl.gap <= tol && rw.gap <= tol && pattern_gap <= tol) break;
      }
    }

    const double edge = W * (1.0 - 1e-9);
    if (std::abs(w) < edge && std::abs(lambda) < edge) break;
    if (growth == kMaxGrowth) {
      throw UnboundedDirection(
          "free-relaxation minimizer stays on the box boundary after growth to W = " + std::to_string(W) +
          "; objective is likely not coercive along the search plane");
    }
    W *= 2.0;
  }

  SearchResult out;
  out.lambda = lambda;
  out.w = w;
  out.value = value;
  out.gap = gap;
  out.evaluations = evals;
  out.box = W;
  return out;
}

// REGA step: best (atom, lambda) over the dictionary; gap is the max per-atom gap.
inline SearchResult joint_dict_line_search(const ConvexObjective& E, const Vector& G, const Dictionary& dict,
                                           double target_gap) {
  SearchResult best;
  std::size_t evals = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    SearchResult r = line_search_unit_interval(E, G, dict[i], target_gap);
    evals += r.evaluations;
    worst_gap = std::max(worst_gap, r.gap);
    if (i == 0 || r.value < best.value) {
      best = r;
      best.atom = i;
    }
  }
  best.gap = worst_gap;
  best.evaluations = evals;
  return best;
}

// EGAFR step: best (atom, w, lambda) over the dictionary.
inline SearchResult joint_dict_free_search(const ConvexObjective& E, const Vector& G, const Dictionary& dict,
                                           double target_gap, double w_max) {
  SearchResult best;
  std::size_t evals = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    SearchResult r = free_relaxation_search(E, G, dict[i], target_gap, w_max);
    evals += r.evaluations;
    worst_gap = std::max(worst_gap, r.gap);
    if (i == 0 || r.value < best.value) {
      best = r;
      best.atom = i;
    }
  }
  best.gap = worst_gap;
  best.evaluations = evals;
  return best;
}

// Parameter space of one step, used to re-evaluate perturbed parameters.
struct StepSpace {
  std::function<double(double lambda, double w)> value;
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  std::optional<std::pair<double, double>> w_range;  // present for free relaxation
};

inline StepSpace relaxed_step_space(const ConvexObjective& E, const Vector& G, const Vector& phi) {
  return {[&E, G, phi](double lambda, double) { return E((1.0 - lambda) * G + lambda * phi); }, 0.0, 1.0,
          std::nullopt};
}

inline StepSpace free_step_space(const ConvexObjective& E, const Vector& G, const Vector& phi, double box) {
  return {[&E, G, phi](double lambda, double w) { return E((1.0 - w) * G + lambda * phi); }, -box, box,
          std::make_pair(-box, box)};
}

// Tolerance mode checks the search already honored delta. Inject mode moves
// the parameters along a seeded random direction, bisecting the step length
// until the value rises by an amount in [delta/2, delta].
template <class Rng>
SearchResult apply_error_mode(const SearchResult& result, double delta, ErrorMode mode, Rng& rng,
                              const StepSpace& space) {
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
  SearchResult out = result;
  out.injected_error = 0.0;
  out.injection_flat = false;
  if (delta == 0.0) return out;
  if (mode == ErrorMode::kTolerance) {
    const double floor = 1e-12 * (1.0 + std::abs(result.value));
    if (result.gap > delta + floor) {
      std::ostringstream os;
      os << "certified gap " << result.gap << " exceeds allowed slack " << delta;
      throw ContractViolation(os.str());
    }
    return out;
  }

  const bool two_dim = space.w_range.has_value();
  const double w0 = result.w.value_or(0.0);
  double dl = 1.0, dw = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (two_dim) {
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    dl = std::cos(angle);
    dw = std::sin(angle);
  } else {
    dl = unit(rng) < 0.5 ? -1.0 : 1.0;
  }

  auto reach = [&](double sl, double sw) {
    double s = std::numeric_limits<double>::infinity();
    auto lim = [&](double p, double d, double lo, double hi) {
      if (d > 0) s = std::min(s, (hi - p) / d);
      if (d < 0) s = std::min(s, (lo - p) / d);
    };
    lim(result.lambda, sl, space.lambda_lo, space.lambda_hi);
    if (two_dim) lim(w0, sw, space.w_range->first, space.w_range->second);
    return std::max(s, 0.0);
  };
  auto value_at = [&](double sl, double sw, double s) {
    const double v = space.value(result.lambda + s * sl, w0 + s * sw);
    if (!std::isfinite(v)) throw NumericalError("non-finite objective value while injecting error");
    return v;
  };
  auto in_band = [&](double v) { return v - result.value >= 0.5 * delta && v - result.value <= delta; };

  for (int attempt = 0; attempt < 2; ++attempt, dl = -dl, dw = -dw) {
    double hi = reach(dl, dw);
    if (!(hi > 0.0)) continue;
    double v = value_at(dl, dw, hi);
    if (v - result.value < 0.5 * delta) continue;
    double lo = 0.0, s = hi;
    for (int it = 0; it < 200 && !in_band(v); ++it) {
      s = 0.5 * (lo + hi);
      v = value_at(dl, dw, s);
      if (v - result.value < 0.5 * delta) {
        lo = s;
      } else if (v - result.value > delta) {
        hi = s;
      }
    }
    if (!in_band(v)) continue;
    out.lambda = result.lambda + s * dl;
    if (two_dim) out.w = w0 + s * dw;
    out.value = v;
    out.injected_error = v - result.value;
    return out;
  }
  out.injection_flat = true;
  return out;
}

}  // namespace greedy
