#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "greedy/dictionary.hpp"

namespace greedy {

// An iterate G kept both as a vector and as atom coefficients, so that
// membership in the closed convex hull A1(D) can be read off the l1 weight.
class Expansion {
 public:
  Expansion() = default;

  // G = 0 over the given dictionary.
  explicit Expansion(const Dictionary& dict)
      : coeffs_(dict.size(), 0.0), value_(Vector::Zero(dict.dimension())) {}

  const Vector& vector() const noexcept { return value_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

  std::vector<std::pair<std::size_t, double>> pairs() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] != 0.0) out.emplace_back(i, coeffs_[i]);
    }
    return out;
  }

  double l1_weight() const {
    double s = 0.0;
    for (double c : coeffs_) s += std::abs(c);
    return s;
  }

  // Recomputes sum_i c_i g_i from the coefficients alone.
  Vector materialize(const Dictionary& dict) const {
    Vector out = Vector::Zero(dict.dimension());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] != 0.0) out += coeffs_[i] * dict[i];
    }
    return out;
  }

  // G <- scale * G + step * atom
  void update(const Dictionary& dict, double scale, std::size_t atom, double step) {
    for (double& c : coeffs_) c *= scale;
    coeffs_.at(atom) += step;
    value_ = scale * value_ + step * dict[atom];
  }

 private:
  std::vector<double> coeffs_;
  Vector value_;
};

}  // namespace greedy
