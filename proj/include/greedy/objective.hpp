#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "greedy/vector.hpp"

namespace greedy {

// Which sublevel set a smoothness bound is claimed on.
enum class SmoothnessDomain {
  kSublevelA1,  // D ∩ A1(D), D = {E <= E(0)}
  kSublevelD1,  // D1 = {E <= E(0) + 1}
};

// rho(E, S, u) <= gamma * u^q on the tagged domain, q in (1, 2].
class SmoothnessCertificate {
 public:
  SmoothnessCertificate(double gamma, double q, SmoothnessDomain domain = SmoothnessDomain::kSublevelA1)
      : gamma_(gamma), q_(q), domain_(domain) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 0");
    if (!(q > 1.0 && q <= 2.0)) throw InvalidArgument("q must be in (1,2]");
  }

  double gamma() const noexcept { return gamma_; }
  double q() const noexcept { return q_; }
  double p() const noexcept { return q_ / (q_ - 1.0); }
  SmoothnessDomain domain() const noexcept { return domain_; }

  SmoothnessCertificate with_domain(SmoothnessDomain d) const { return {gamma_, q_, d}; }

  double bound(double u) const { return gamma_ * std::pow(u, q_); }

 private:
  double gamma_;
  double q_;
  SmoothnessDomain domain_;
};

enum class ObjectiveKind { kQuadratic, kPPower, kLogSumExp, kCustom };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::kQuadratic: return "quadratic";
    case ObjectiveKind::kPPower: return "p-power";
    case ObjectiveKind::kLogSumExp: return "log-sum-exp";
    case ObjectiveKind::kCustom: return "custom";
  }
  return "?";
}

// Parameter data of the built-in kinds; empty for custom objectives.
struct ObjectiveParameters {
  Vector center;  // f for quadratic and p-power
  double power = 2.0;
  Eigen::MatrixXd data;  // rows a_j for log-sum-exp
  Vector offsets;        // b_j for log-sum-exp
};

// A convex function E on R^n with optional Fréchet derivative E'.
class ConvexObjective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  ConvexObjective(ObjectiveKind kind, Eigen::Index dimension, ValueFn value, GradientFn gradient,
                  std::optional<SmoothnessCertificate> smoothness, std::string descriptor,
                  ObjectiveParameters params = {})
      : kind_(kind),
        dimension_(dimension),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        smoothness_(smoothness),
        descriptor_(std::move(descriptor)),
        params_(std::move(params)) {
    if (dimension < 1) throw InvalidArgument("objective dimension must be >= 1");
    if (!value_) throw InvalidArgument("objective needs a value function");
  }

  ObjectiveKind kind() const noexcept { return kind_; }
  Eigen::Index dimension() const noexcept { return dimension_; }
  const std::optional<SmoothnessCertificate>& smoothness() const noexcept { return smoothness_; }
  const std::string& descriptor() const noexcept { return descriptor_; }
  bool has_gradient() const noexcept { return static_cast<bool>(gradient_); }

  double operator()(const Vector& x) const { return value_(x); }
  double value(const Vector& x) const { return value_(x); }

  Vector gradient(const Vector& x) const {
    if (!gradient_) throw InvalidArgument("objective '" + descriptor_ + "' has no gradient");
    return gradient_(x);
  }

  const ObjectiveParameters& parameters() const noexcept { return params_; }

  ConvexObjective with_certificate(std::optional<SmoothnessCertificate> c) const {
    ConvexObjective o = *this;
    o.smoothness_ = c;
    return o;
  }

 private:
  ObjectiveKind kind_;
  Eigen::Index dimension_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<SmoothnessCertificate> smoothness_;
  std::string descriptor_;
  ObjectiveParameters params_;
};

namespace detail {

// sup { ||y||_r^r : ||y||_p = 1 } in R^n, for r in (1, 2].
inline double unit_ball_power_sup(Eigen::Index n, double r, NormKind norm) {
  if (norm.p() <= r) return 1.0;
  const double inv_p = norm.is_infinity() ? 0.0 : 1.0 / norm.p();
  return std::pow(static_cast<double>(n), 1.0 - r * inv_p);
}

inline std::string describe(const char* kind, const Vector& f) {
  std::ostringstream os;
  os.precision(17);
  os << kind << "(f=";
  for (Eigen::Index i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
  os << ")";
  return os.str();
}

}  // namespace detail

// E(x) = ||x - f||_2^2. Modulus rho(E,u) = u^2 * sup ||y||_2^2 over the unit sphere of `norm`.
inline ConvexObjective quadratic_objective(const Vector& f, NormKind norm = NormKind(2.0)) {
  require_finite(f, "objective.f");
  const double gamma = detail::unit_ball_power_sup(f.size(), 2.0, norm);
  ConvexObjective obj(
      ObjectiveKind::kQuadratic, f.size(), [f](const Vector& x) { return (x - f).squaredNorm(); },
      [f](const Vector& x) -> Vector { return 2.0 * (x - f); }, SmoothnessCertificate(gamma, 2.0),
      detail::describe("quadratic", f), ObjectiveParameters{f, 2.0, {}, {}});
  return obj;
}

// E(x) = sum_i |x_i - f_i|^r, r in (1, 2]; rho(E,u) <= u^r under the l_r norm.
inline ConvexObjective p_power_objective(const Vector& f, double r, NormKind norm = NormKind(2.0)) {
  require_finite(f, "objective.f");
  if (!(r > 1.0 && r <= 2.0)) throw InvalidArgument("p-power exponent must be in (1,2]");
  const double gamma = detail::unit_ball_power_sup(f.size(), r, norm);
  ConvexObjective obj(
      ObjectiveKind::kPPower, f.size(),
      [f, r](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - f[i]), r);
        return s;
      },
      [f, r](const Vector& x) -> Vector {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double d = x[i] - f[i];
          g[i] = d == 0.0 ? 0.0 : r * std::pow(std::abs(d), r - 1.0) * (d > 0 ? 1.0 : -1.0);
        }
        return g;
      },
      SmoothnessCertificate(gamma, r), detail::describe("p-power", f),
      ObjectiveParameters{f, r, {}, {}});
  return obj;
}

// E(x) = log sum_j exp(<a_j, x> - b_j), rows a_j of `data`.
inline ConvexObjective log_sum_exp_objective(const Eigen::MatrixXd& data, const Vector& offsets,
                                             NormKind norm = NormKind(2.0)) {
  if (data.rows() < 1 || data.cols() < 1) throw InvalidArgument("log-sum-exp needs a nonempty data matrix");
  if (offsets.size() != data.rows()) throw InvalidArgument("log-sum-exp offsets size mismatch");
  if (!data.allFinite()) throw InvalidArgument("objective.a: non-finite entry");
  require_finite(offsets, "objective.b");
  const double max_row = data.rowwise().squaredNorm().maxCoeff();
  const double gamma = 0.5 * max_row * detail::unit_ball_power_sup(data.cols(), 2.0, norm);
  auto value = [data, offsets](const Vector& x) {
    const Vector z = data * x - offsets;
    const double zmax = z.maxCoeff();
    return zmax + std::log((z.array() - zmax).exp().sum());
  };
  auto grad = [data, offsets](const Vector& x) -> Vector {
    const Vector z = data * x - offsets;
    const Vector w = (z.array() - z.maxCoeff()).exp().matrix();
    return data.transpose() * (w / w.sum());
  };
  std::ostringstream os;
  os << "log-sum-exp(rows=" << data.rows() << ",cols=" << data.cols() << ")";
  ConvexObjective obj(ObjectiveKind::kLogSumExp, data.cols(), value, grad,
                      SmoothnessCertificate(std::max(gamma, 1e-300), 2.0), os.str(),
                      ObjectiveParameters{{}, 2.0, data, offsets});
  return obj;
}

}  // namespace greedy
