#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "greedy/error.hpp"

namespace greedy {

using Vector = Eigen::VectorXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline const Vector& require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidArgument(std::string(what) + ": non-finite entry");
  }
  return v;
}

// The ambient norm ||.||_p, p in [1, inf].
class NormKind {
 public:
  constexpr NormKind() = default;

  explicit NormKind(double p) : p_(p) {
    if (!(p >= 1.0)) {
      throw InvalidArgument("norm.p must be in [1, inf], got " + std::to_string(p));
    }
  }

  static NormKind infinity() { return NormKind(std::numeric_limits<double>::infinity()); }

  double p() const noexcept { return p_; }
  bool is_infinity() const noexcept { return std::isinf(p_); }

  double operator()(const Vector& v) const {
    if (is_infinity()) return v.cwiseAbs().maxCoeff();
    if (p_ == 1.0) return v.cwiseAbs().sum();
    if (p_ == 2.0) return v.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p_);
    return std::pow(s, 1.0 / p_);
  }

  // Rescale v to unit norm. Zero vectors are rejected.
  Vector normalize(const Vector& v) const {
    const double n = (*this)(v);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    return v / n;
  }

  friend bool operator==(const NormKind& a, const NormKind& b) { return a.p_ == b.p_; }

 private:
  double p_ = 2.0;
};

}  // namespace greedy
