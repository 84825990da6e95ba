#pragma once

// Brute-force reference computations used only by tests. None of these call
// into the library's search routines.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace greedy::oracle {

struct GridMin1d {
  double x;
  double value;
};

// Uniform grid with `points` samples on [lo, hi].
template <class F>
GridMin1d grid_min_1d(F&& f, double lo, double hi, std::size_t points) {
  GridMin1d best{lo, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = f(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

struct GridMin2d {
  double x;
  double y;
  double value;
};

template <class F>
GridMin2d grid_min_2d(F&& f, double lo, double hi, std::size_t points) {
  GridMin2d best{lo, lo, std::numeric_limits<double>::infinity()};
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + h * static_cast<double>(i);
    for (std::size_t j = 0; j < points; ++j) {
      const double y = lo + h * static_cast<double>(j);
      const double v = f(x, y);
      if (v < best.value) best = {x, y, v};
    }
  }
  return best;
}

// Central differences.
template <class F>
Eigen::VectorXd finite_difference_gradient(F&& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

}  // namespace greedy::oracle
