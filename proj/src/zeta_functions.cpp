#include "hz/zeta_functions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hz {

namespace {

// Neumaier-compensated complex accumulator; keeps reductions order-stable and accurate.
class Accumulator {
 public:
  void add(cplx x) {
    add_part(re_, cre_, x.real());
    add_part(im_, cim_, x.imag());
  }
  cplx value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double re_ = 0.0, im_ = 0.0, cre_ = 0.0, cim_ = 0.0;
};

double per_letter_bound(const MarkovPartition& p) {
  const auto d0 = p.group().letter_displacement_bound();
  if (!d0 || *d0 <= 0.0) throw DomainError("no positive per-letter displacement bound for this group");
  return *d0;
}

void check_mode(cplx s, ZetaMode mode, ZetaValue& out) {
  if (s.real() > 1.0) return;
  if (mode == ZetaMode::certified)
    throw DomainError("Re s <= 1 is outside the certified region; request exploratory mode");
  out.certified = false;
  out.warning = "Re s <= 1: truncated series outside its convergence region, value not certified";
}

}  // namespace

OrbitSpectrum::OrbitSpectrum(const MarkovPartition& p, double L_max, const Observable& a)
    : L_max_(L_max), observable_id_(a.id()) {
  if (!(L_max > 0.0)) throw DomainError("L_max must be positive");
  if (!a.stable_constant())
    throw UnsupportedModeError("orbit integrals need a stable-constant observable ('" + a.id() + "')");
  const int max_period = std::max(1, static_cast<int>(std::floor(L_max / per_letter_bound(p))));
  std::vector<double> primitive;
  for (const auto& c : orbit_classes(p, max_period)) {
    if (c.length > L_max) continue;
    OrbitTerm t;
    t.length = c.length;
    t.primitive_length = c.primitive_length;
    t.multiplicity = c.multiplicity;
    for (double x : c.points) t.observable_integral += stable_weight(a, p, p.locate(x), x);
    density_ = std::max(density_, std::abs(t.observable_integral) / t.primitive_length);
    if (c.multiplicity == 1) primitive.push_back(c.length);
    terms_.push_back(t);
  }
  std::sort(primitive.begin(), primitive.end());
  // least-squares fit of log N(x) on the upper half of the range
  std::vector<double> xs, ys;
  for (int k = 0; k <= 20; ++k) {
    const double x = L_max * (0.5 + 0.5 * k / 20.0);
    const auto n = std::upper_bound(primitive.begin(), primitive.end(), x) - primitive.begin();
    if (n > 0) {
      xs.push_back(x);
      ys.push_back(std::log(static_cast<double>(n)));
    }
  }
  if (xs.size() < 2) throw DomainError("L_max too small to fit the orbit counting exponent");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  h_ = std::max(sxy / sxx, 1e-3);
  for (std::size_t k = 0; k < xs.size(); ++k) c_ = std::max(c_, std::exp(ys[k] - 1.1 * h_ * xs[k]));
}

double OrbitSpectrum::tail(double sigma, bool with_observable) const {
  const double h = 1.1 * h_;
  const double kappa = sigma - h;
  if (kappa <= 0.0) return std::numeric_limits<double>::infinity();
  const double e = std::exp(-kappa * L_max_);
  const double i0 = e / kappa, i1 = e * (L_max_ / kappa + 1.0 / (kappa * kappa));
  // primitive orbits beyond L_max, with density c h e^{hL}
  double bound = c_ * h * (with_observable ? density_ * i1 : i0);
  // iterates of short primitive orbits that exceed L_max
  for (const auto& t : terms_) {
    if (t.multiplicity != 1) continue;
    const int k0 = static_cast<int>(std::floor(L_max_ / t.length)) + 1;
    const double w = with_observable ? std::abs(t.observable_integral) : 1.0;
    bound += w * std::exp(-sigma * k0 * t.length) / (1.0 - std::exp(-sigma * t.length));
  }
  return bound;
}

ZetaValue zeta(cplx s, const OrbitSpectrum& spec, ZetaMode mode) {
  ZetaValue out;
  check_mode(s, mode, out);
  Accumulator acc;
  for (const auto& t : spec.terms()) acc.add(std::exp(-s * t.length) / (1.0 - std::exp(-t.length)) * t.observable_integral);
  out.value = acc.value();
  out.L_max = spec.L_max();
  out.tail_bound = spec.tail(s.real(), true) / (1.0 - std::exp(-spec.L_max()));
  return out;
}

ZetaValue zeta2(cplx s, const OrbitSpectrum& spec, ZetaMode mode) {
  ZetaValue out;
  check_mode(s, mode, out);
  Accumulator acc;
  for (const auto& t : spec.terms()) {
    const double sh = std::sinh(0.5 * t.length);
    acc.add(std::exp(-(s - 1.0) * t.length) / (sh * sh) * t.observable_integral);
  }
  out.value = acc.value();
  out.L_max = spec.L_max();
  const double q = 1.0 - std::exp(-spec.L_max());
  out.tail_bound = 4.0 * spec.tail(s.real(), true) / (q * q);
  return out;
}

ZetaValue rcal(cplx s, int m, const OrbitSpectrum& spec, ZetaMode mode) {
  if (m < 0) throw DomainError("rcal weight index must be nonnegative");
  ZetaValue out;
  check_mode(s, mode, out);
  Accumulator acc;
  for (const auto& t : spec.terms()) {
    const double half = 0.5 * t.length;
    acc.add(t.observable_integral / std::sinh(half) * std::pow(std::tanh(half), 0.5 * m) *
            std::exp(-2.0 * (s - 0.5) * std::log(std::cosh(half))));
  }
  out.value = acc.value();
  out.L_max = spec.L_max();
  const double sigma = s.real();
  out.tail_bound = std::pow(2.0, 2.0 * sigma) * spec.tail(sigma, true) / (1.0 - std::exp(-spec.L_max()));
  return out;
}

std::vector<cplx> recoupling_coefficients(cplx s, int n_max) {
  if (n_max < 0) throw DomainError("recoupling order must be nonnegative");
  // 2(1 - sqrt(1 - x))/x = sum_k Catalan(k) (x/4)^k
  std::vector<double> c(static_cast<std::size_t>(n_max) + 1, 1.0);
  for (int k = 1; k <= n_max; ++k) c[k] = c[k - 1] * (2.0 * k - 1.0) / (2.0 * (k + 1.0));
  const cplx alpha = 2.0 * s - 1.0;
  std::vector<cplx> b(static_cast<std::size_t>(n_max) + 1);
  b[0] = 1.0;
  // power of a series with unit constant term (J.C.P. Miller)
  for (int n = 1; n <= n_max; ++n) {
    cplx acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += ((alpha + 1.0) * static_cast<double>(k) - static_cast<double>(n)) * c[k] * b[n - k];
    b[n] = acc / static_cast<double>(n);
  }
  return b;
}

cplx recoupling_B(cplx s, int n) { return recoupling_coefficients(s, n).back(); }

namespace {

LogValue euler_product(cplx s, const OrbitSpectrum& spec, bool twice) {
  const double sigma = s.real();
  if (sigma <= 0.0) throw DomainError("Euler products need Re s > 0");
  LogValue out;
  Accumulator acc;
  for (const auto& t : spec.terms()) {
    if (t.multiplicity != 1) continue;
    ++out.terms;
    for (int m = 0;; ++m) {
      const cplx w = std::exp(-(s + static_cast<double>(m)) * t.length);
      acc.add((twice ? m + 1.0 : 1.0) * std::log(1.0 - w));
      if (std::abs(w) * (m + 2.0) < 1e-18) break;
    }
  }
  out.log_value = acc.value();
  const double q = 1.0 - std::exp(-spec.L_max());
  // |log(1 - w)| <= |w| / (1 - |w|); summed over m this is below e^{-sigma L}/(1 - e^{-L})^{1 or 2}
  const double worst = std::exp(-sigma * spec.L_max());
  out.tail_bound = spec.tail(sigma, false) / (twice ? q * q : q) / (1.0 - worst);
  return out;
}

}  // namespace

LogValue log_euler_product(cplx s, const OrbitSpectrum& spec) { return euler_product(s, spec, false); }
LogValue log_euler_product_double(cplx s, const OrbitSpectrum& spec) { return euler_product(s, spec, true); }

LogValue log_orbit_sum_exponential(cplx s, const MarkovPartition& p, int n_max, double target) {
  const double sigma = s.real();
  const double d0 = per_letter_bound(p);
  const auto dim = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = p.transition(static_cast<int>(i), static_cast<int>(j));
  const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  const double ratio = rho * std::exp(-sigma * d0);
  if (ratio >= 1.0) throw DomainError("orbit-sum exponential does not converge at this s");
  // sum_{n > n0} (1/n) dim rho^n e^{-sigma n d0}/(1 - e^{-n d0})
  const auto tail_after = [&](int n0) {
    double t = 0.0;
    for (int n = n0 + 1; n < n0 + 2000; ++n) {
      const double term = static_cast<double>(dim) * std::pow(ratio, n) / (1.0 - std::exp(-n * d0)) / n;
      t += term;
      if (term < 1e-30) break;
    }
    return t;
  };
  if (n_max <= 0) {
    n_max = 1;
    while (tail_after(n_max) > target) {
      if (++n_max > 14) throw DomainError("orbit-sum exponential needs more than 14 orders for this target");
    }
  }
  LogValue out;
  Accumulator acc;
  for (int n = 1; n <= n_max; ++n) {
    Accumulator level;
    for (const auto& o : periodic_orbits(p, n)) {
      const double l = o.log_derivative_sum;
      level.add(std::exp(-s * l) / (1.0 - std::exp(-l)));
      ++out.terms;
    }
    acc.add(-level.value() / static_cast<double>(n));
  }
  out.log_value = acc.value();
  out.tail_bound = tail_after(n_max);
  return out;
}

cplx zeta_via_determinant(cplx s, const TransferOperator& op) { return -op.dlog_determinant_dz(s); }

cplx zeta2_via_determinant(cplx s, const TransferOperator& op) {
  Accumulator acc;
  for (int n = 0; n < 60; ++n) {
    const cplx term = op.dlog_determinant_dz(s + static_cast<double>(n));
    acc.add(term);
    if (std::abs(term) < 1e-17 * std::abs(acc.value())) break;
  }
  return -4.0 * acc.value();
}

ContourResidue zeta2_residue(cplx s_n, const TransferOperator& op, double radius, int points) {
  if (points < 8 || points % 2) throw DomainError("contour needs an even number of at least 8 points");
  Accumulator full, half;
  for (int k = 0; k < points; ++k) {
    const cplx e = std::polar(1.0, kTwoPi * k / points);
    const cplx w = zeta2_via_determinant(s_n + radius * e, op) * radius * e;
    full.add(w / static_cast<double>(points));
    if (k % 2 == 0) half.add(2.0 * w / static_cast<double>(points));
  }
  ContourResidue out;
  out.value = full.value();
  out.radius = radius;
  out.points = points;
  out.discrepancy = std::abs(full.value() - half.value());
  return out;
}

}  // namespace hz
