#include "hz/observable.hpp"

#include <cmath>

#include "hz/quadrature.hpp"

namespace hz {

Observable Observable::constant(double c) {
  Observable o;
  o.id_ = c == 1.0 ? "one" : "constant";
  o.stable_ = [c](double, double) { return c; };
  o.primitive_ = [c](double, double sigma) { return c * sigma; };
  o.rule_ = [c](double, double, double) { return c; };
  return o;
}

Observable Observable::stable(std::string id, StableRule f, StableRule primitive) {
  Observable o;
  o.id_ = std::move(id);
  o.stable_ = std::move(f);
  o.primitive_ = std::move(primitive);
  o.rule_ = [f = o.stable_](double bm, double bp, double t) { return f(bp, t + horocycle_offset(bm, bp)); };
  return o;
}

Observable Observable::general(std::string id, Rule a) {
  Observable o;
  o.id_ = std::move(id);
  o.rule_ = std::move(a);
  return o;
}

double Observable::operator()(double theta_minus, double theta_plus, double t) const {
  return rule_(theta_minus, theta_plus, t);
}

double Observable::stable_value(double theta, double sigma) const {
  if (!stable_) throw UnsupportedModeError("observable '" + id_ + "' is not stable-constant");
  return stable_(theta, sigma);
}

double Observable::window_integral(double theta, double lo, double hi) const {
  if (!stable_) throw UnsupportedModeError("observable '" + id_ + "' is not stable-constant");
  if (primitive_) return primitive_(theta, hi) - primitive_(theta, lo);
  return quad::adaptive([&](double s) { return stable_(theta, s); }, lo, hi, 1e-14).value;
}

Observable Observable::combine(double alpha, const Observable& other, double beta) const {
  Observable o;
  o.id_ = id_ + "+" + other.id_;
  o.rule_ = [x = rule_, y = other.rule_, alpha, beta](double bm, double bp, double t) {
    return alpha * x(bm, bp, t) + beta * y(bm, bp, t);
  };
  if (stable_ && other.stable_) {
    o.stable_ = [x = stable_, y = other.stable_, alpha, beta](double th, double s) {
      return alpha * x(th, s) + beta * y(th, s);
    };
    if (primitive_ && other.primitive_)
      o.primitive_ = [x = primitive_, y = other.primitive_, alpha, beta](double th, double s) {
        return alpha * x(th, s) + beta * y(th, s);
      };
  }
  return o;
}

double horocycle_offset(double theta_minus, double theta_plus) {
  const BoundaryPoint b(theta_plus);
  const cplx z0 = frame_to_group({BoundaryPoint(theta_minus), b, 0.0})(0.0);
  return busemann(DiscPoint(z0), b);
}

double stable_weight(const Observable& a, const MarkovPartition& p, int interval, double theta) {
  return a.window_integral(theta, 0.0, p.log_derivative(interval, theta));
}

Observable builtin_observable(const std::string& id) {
  if (id == "one") return Observable::constant(1.0);
  if (id == "cos_theta")
    return Observable::stable(
        id, [](double th, double) { return std::cos(th); }, [](double th, double s) { return std::cos(th) * s; });
  if (id == "sin_theta")
    return Observable::stable(
        id, [](double th, double) { return std::sin(th); }, [](double th, double s) { return std::sin(th) * s; });
  if (id == "cos_4theta")
    return Observable::stable(
        id, [](double th, double) { return std::cos(4.0 * th); },
        [](double th, double s) { return std::cos(4.0 * th) * s; });
  if (id == "exp_cos_theta")
    return Observable::stable(
        id, [](double th, double) { return std::exp(std::cos(th)); },
        [](double th, double s) { return std::exp(std::cos(th)) * s; });
  if (id == "sigma_plus_sin2theta")
    return Observable::stable(
        id, [](double th, double s) { return s + std::sin(2.0 * th); },
        [](double th, double s) { return 0.5 * s * s + std::sin(2.0 * th) * s; });
  if (id == "frame_mixed")
    return Observable::general(id, [](double bm, double bp, double t) {
      return std::cos(bm - bp) * std::exp(-0.25 * t * t) + std::cos(4.0 * bp) + 0.5 * std::sin(bm - bp) * t;
    });
  throw DomainError("unknown observable '" + id + "'");
}

}  // namespace hz
