#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "greedy/config.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/objective.hpp"
#include "greedy/trace.hpp"

namespace greedy {

// Euclidean projection onto {x : ||x||_1 <= radius} (sort-based).
inline Vector project_l1_ball(const Vector& f, double radius = 1.0) {
  if (f.cwiseAbs().sum() <= radius) return f;
  std::vector<double> mags(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) mags[i] = std::abs(f[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumsum += mags[k];
    const double t = (cumsum - radius) / static_cast<double>(k + 1);
    if (mags[k] - t > 0.0) theta = t;
  }
  Vector out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(f[i]) - theta, 0.0), f[i]);
  }
  return out;
}

inline bool is_canonical(const Dictionary& dict) {
  if (dict.size() != static_cast<std::size_t>(2 * dict.dimension())) return false;
  for (Eigen::Index i = 0; i < dict.dimension(); ++i) {
    if (dict[2 * i] != Vector::Unit(dict.dimension(), i)) return false;
  }
  return true;
}

// Closed-form b where one is known:
//  - relaxed algorithms, b = inf over A1(D): quadratic with the canonical
//    dictionary (distance to the l1 ball) and p-power with f in the l1 ball;
//  - free relaxation, b = inf over D: 0 for quadratic and p-power.
inline Reference analytic_reference(const ConvexObjective& obj, const Dictionary& dict, Algorithm algorithm) {
  const auto kind = obj.kind();
  if (kind != ObjectiveKind::kQuadratic && kind != ObjectiveKind::kPPower) {
    throw InvalidArgument(std::string("no analytic reference for ") + to_string(kind) + " objectives");
  }
  const Vector& f = obj.parameters().center;
  if (uses_free_relaxation(algorithm)) return {0.0, ReferenceSource::kAnalytic, "inf over D at x = f"};
  if (is_canonical(dict)) {
    if (f.cwiseAbs().sum() <= 1.0) return {0.0, ReferenceSource::kAnalytic, "f in A1(D)"};
    if (kind == ObjectiveKind::kQuadratic) {
      return {obj(project_l1_ball(f)), ReferenceSource::kAnalytic, "distance to the l1 ball"};
    }
  }
  throw InvalidArgument("no analytic reference for this objective/dictionary pair; use brute-force or bref.value");
}

namespace detail {

// Compass search over a convex feasible set given by `feasible`, halving the
// step down to 1e-12.
template <class F, class Feasible>
double compass_refine(std::vector<double>& x, double step, F&& f, Feasible&& feasible) {
  const std::size_t k = x.size();
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> d(k, 0.0);
    d[i] = 1.0;
    dirs.push_back(d);
    d[i] = -1.0;
    dirs.push_back(d);
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<double> e(k, 0.0);
      e[i] = 1.0, e[j] = -1.0;
      dirs.push_back(e);
      e[i] = -1.0, e[j] = 1.0;
      dirs.push_back(e);
    }
  }
  double best = f(x);
  std::vector<double> trial(k);
  while (step > 1e-12) {
    bool moved = false;
    for (const auto& d : dirs) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + step * d[i];
      if (!feasible(trial)) continue;
      const double v = f(trial);
      if (v < best) {
        best = v;
        x = trial;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

// Lattice points of {c >= 0, sum c <= 1} in `dims` coordinates with `steps` per unit.
inline void simplex_lattice(std::size_t dims, int steps, std::vector<std::vector<double>>& out) {
  std::vector<int> idx(dims, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t d, int remaining) {
    if (d == dims) {
      std::vector<double> c(dims);
      for (std::size_t i = 0; i < dims; ++i) c[i] = static_cast<double>(idx[i]) / steps;
      out.push_back(std::move(c));
      return;
    }
    for (int i = 0; i <= remaining; ++i) {
      idx[d] = i;
      rec(d + 1, remaining - i);
    }
  };
  rec(0, steps);
}

}  // namespace detail

// Grid reference for n <= 3. Relaxed algorithms: every point of A1(D) lies in
// conv(0, g_1..g_n) for some n atoms, so each n-subset's coefficient simplex
// is gridded and the best few cells refined by compass search. Free
// relaxation: a grid over a cube that doubles while the best point is on its
// face, then the same refinement.
inline Reference brute_force_reference(const ConvexObjective& obj, const Dictionary& dict, Algorithm algorithm) {
  const auto n = static_cast<std::size_t>(dict.dimension());
  if (n > 3) throw InvalidArgument("brute-force reference is limited to n <= 3");

  struct Candidate {
    double value;
    std::vector<std::size_t> subset;
    std::vector<double> x;
  };
  std::vector<Candidate> pool;
  auto keep = [&pool](Candidate c) {
    pool.push_back(std::move(c));
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    if (pool.size() > 8) pool.pop_back();
  };

  if (!uses_free_relaxation(algorithm)) {
    const int steps = n == 1 ? 1000 : (n == 2 ? 100 : 24);
    std::vector<std::vector<double>> lattice;
    detail::simplex_lattice(n, steps, lattice);
    const std::size_t K = dict.size();
    std::vector<std::size_t> subset(n);
    Vector x(dict.dimension());
    auto value_of = [&](const std::vector<std::size_t>& s, const std::vector<double>& c) {
      x.setZero();
      for (std::size_t i = 0; i < s.size(); ++i) x += c[i] * dict[s[i]];
      return obj(x);
    };
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t pos, std::size_t start) {
      if (pos == n) {
        double best = std::numeric_limits<double>::infinity();
        const std::vector<double>* arg = nullptr;
        for (const auto& c : lattice) {
          const double v = value_of(subset, c);
          if (v < best) best = v, arg = &c;
        }
        if (pool.size() < 8 || best < pool.back().value) keep({best, subset, *arg});
        return;
      }
      for (std::size_t i = start; i < K; ++i) {
        subset[pos] = i;
        choose(pos + 1, i + 1);
      }
    };
    choose(0, 0);
    double best = std::numeric_limits<double>::infinity();
    for (auto& c : pool) {
      auto feasible = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double vi : v) {
          if (vi < 0.0) return false;
          s += vi;
        }
        return s <= 1.0;
      };
      best = std::min(best, detail::compass_refine(
                                c.x, 1.0 / steps, [&](const std::vector<double>& v) { return value_of(c.subset, v); },
                                feasible));
    }
    return {best, ReferenceSource::kBruteForce,
            "subset-simplex grid (step 1/" + std::to_string(steps) + ") + compass refinement to 1e-12"};
  }

  const int per_axis = n == 1 ? 2001 : (n == 2 ? 401 : 81);
  Vector x(dict.dimension());
  for (double R = 1.0; R <= 1024.0; R *= 2.0) {
    pool.clear();
    const double h = 2.0 * R / (per_axis - 1);
    std::vector<int> idx(n, 0);
    for (;;) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = x[i] = -R + h * idx[i];
      const double v = obj(x);
      if (pool.size() < 8 || v < pool.back().value) keep({v, {}, p});
      std::size_t d = 0;
      while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
      if (d == n) break;
    }
    auto inside = [R](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [R](double vi) { return std::abs(vi) <= R; });
    };
    auto value_of = [&](const std::vector<double>& v) {
      for (std::size_t i = 0; i < n; ++i) x[i] = v[i];
      return obj(x);
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    for (auto& c : pool) {
      const double v = detail::compass_refine(c.x, h, value_of, inside);
      if (v < best) best = v, arg = c.x;
    }
    const bool on_face = std::any_of(arg.begin(), arg.end(), [&](double vi) { return std::abs(vi) > R - h; });
    if (!on_face) {
      return {best, ReferenceSource::kBruteForce,
              "cube grid (R=" + std::to_string(R) + ", " + std::to_string(per_axis) +
                  " per axis) + compass refinement to 1e-12"};
    }
  }
  throw NumericalError("brute-force reference: minimizer not bounded within |x_i| <= 1024");
}

}  // namespace greedy
