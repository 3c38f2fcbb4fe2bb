#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hz/boundary_coding.hpp"

namespace hz {

/**
 * Phase-space function a(b', b, t) in frame coordinates: b' backward endpoint,
 * b forward endpoint, t arclength from the point of the geodesic closest to 0.
 *
 * Stable-constant observables depend only on b and the horocycle time
 * sigma = <z, b> = t + horocycle_offset(b', b).
 */
class Observable {
 public:
  using Rule = std::function<double(double theta_minus, double theta_plus, double t)>;
  using StableRule = std::function<double(double theta, double sigma)>;

  static Observable constant(double c = 1.0);
  /// `primitive`, if given, is an antiderivative of f in sigma.
  static Observable stable(std::string id, StableRule f, StableRule primitive = nullptr);
  static Observable general(std::string id, Rule a);

  const std::string& id() const { return id_; }
  bool stable_constant() const { return static_cast<bool>(stable_); }

  double operator()(double theta_minus, double theta_plus, double t) const;
  /// f(theta, sigma); UnsupportedModeError unless stable-constant.
  double stable_value(double theta, double sigma) const;
  /// int_lo^hi f(theta, sigma) dsigma.
  double window_integral(double theta, double lo, double hi) const;

  /// Pointwise combination alpha * this + beta * other; stable if both are.
  Observable combine(double alpha, const Observable& other, double beta) const;

 private:
  std::string id_;
  Rule rule_;
  StableRule stable_;
  StableRule primitive_;
};

/// <z0, b> for the point z0 of the geodesic (b', b) closest to the origin.
double horocycle_offset(double theta_minus, double theta_plus);

/// A(y) = int_0^{tau(y)} f(y, sigma) dsigma for y in interval i.
double stable_weight(const Observable& a, const MarkovPartition& p, int interval, double theta);

/// Built-ins: "one", "cos_theta", "sin_theta", "cos_4theta", "exp_cos_theta", "sigma_plus_sin2theta",
/// and "frame_mixed" (not stable).
Observable builtin_observable(const std::string& id);

}  // namespace hz
