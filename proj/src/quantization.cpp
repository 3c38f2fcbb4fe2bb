#include "hz/quantization.hpp"

#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "hz/parallel.hpp"
#include "hz/quadrature.hpp"

namespace hz {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Hyperbolic distance without the DiscPoint boundary guard; callers stay inside supports.
double distance(cplx z, cplx w) { return 2.0 * std::atanh(std::abs(z - w) / std::abs(1.0 - std::conj(w) * z)); }

double cosh_to_geodesic(cplx z, double b_minus, double b_plus) {
  const cplx p1 = std::polar(1.0, b_minus), p2 = std::polar(1.0, b_plus);
  return 2.0 * std::abs(z - p1) * std::abs(z - p2) / (std::abs(p1 - p2) * (1.0 - std::norm(z)));
}

MoebiusMap frame(double b_minus, double b_plus, double t) {
  return frame_to_group({BoundaryPoint(b_minus), BoundaryPoint(b_plus), t});
}

// int_U^inf (1 + u^2)^{-s} du = (1/2) int_0^{x0} v^{s-3/2} (1-v)^{-1/2} dv, x0 = 1/(1+U^2), termwise.
cplx constant_tail(cplx s, double U) {
  const double x0 = 1.0 / (1.0 + U * U);
  const cplx a = s - 0.5;
  cplx sum = 0.0, c = 1.0;
  double xk = 1.0;
  for (int k = 0; k < 200; ++k) {
    const cplx term = c * xk / (a + double(k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    c *= (0.5 + k) / (k + 1.0);
    xk *= x0;
  }
  return 0.5 * std::pow(x0, a) * sum;
}

// Panel breakpoints on [0, U], width at most pi/(4 r w(u)).
std::vector<double> panel_breaks(double U, double r, double cap) {
  std::vector<double> out{0.0};
  const double rr = std::abs(r);
  while (out.back() < U) {
    const double u = out.back();
    const double rate = u <= 1.0 ? 1.0 : 2.0 * u / (1.0 + u * u);
    const double h = rr > 0.0 ? std::min(cap, kPi / (4.0 * rr * rate)) : cap;
    out.push_back(std::min(U, u + h));
  }
  return out;
}

// Kronrod 15 on a panel, bisected until the Gauss-Kronrod difference drops below abs_tol.
// An absolute target avoids chasing relative accuracy on panels where the symbol is negligible.
template <class F>
quad::Estimate<cplx> panel_integral(F&& f, double a, double b, double abs_tol, int depth = 12) {
  double err = 0.0;
  const cplx v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  err *= 0.5 * (b - a);  // Boost reports the error of the rule mapped to [-1, 1]
  if (err <= abs_tol || depth == 0) return {v, err};
  const double mid = 0.5 * (a + b);
  const auto left = panel_integral(f, a, mid, 0.5 * abs_tol, depth - 1);
  const auto right = panel_integral(f, mid, b, 0.5 * abs_tol, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

cplx PlaneWave::operator()(cplx z) const { return std::exp((0.5 + I * r) * busemann(DiscPoint(z), b)); }

std::function<cplx(cplx)> op_on_plane_wave(const WaveSymbol& a, const PlaneWave& wave) {
  return [a, wave](cplx z) { return a(z, wave.b.theta(), wave.r) * wave(z); };
}

std::function<cplx(cplx)> translate(const MoebiusMap& gamma, std::function<cplx(cplx)> f) {
  const MoebiusMap inv = gamma.inverse();
  return [inv, f = std::move(f)](cplx z) { return f(inv(z)); };
}

double equivariance_defect(const WaveSymbol& a, const PlaneWave& wave, const MoebiusMap& gamma, cplx z) {
  const cplx s = 0.5 + I * wave.r;
  const BoundaryPoint gb = BoundaryPoint::from_complex(gamma(wave.b.point()));
  const cplx factor = std::exp(-s * busemann(DiscPoint(gamma(0.0)), gb));
  const cplx lhs = factor * op_on_plane_wave(a, PlaneWave{wave.r, gb})(z);
  const cplx rhs = translate(gamma, op_on_plane_wave(a, wave))(z);
  return std::abs(lhs - rhs);
}

PhaseSymbol PhaseSymbol::constant(cplx c) {
  PhaseSymbol p;
  p.f_ = [c](cplx, double) { return c; };
  p.kind_ = Kind::constant;
  p.sup_ = std::abs(c);
  p.c_ = c;
  return p;
}

PhaseSymbol PhaseSymbol::gaussian_bump(cplx center, double width) {
  if (width <= 0.0) throw DomainError("gaussian_bump: width must be positive");
  PhaseSymbol p;
  p.f_ = [center, width](cplx z, double) {
    const double d = distance(z, center) / width;
    return cplx(std::exp(-d * d));
  };
  p.kind_ = Kind::localized;
  p.center_ = center;
  p.radius_ = width * std::sqrt(42.0);  // e^{-42} < 1e-18
  return p;
}

PhaseSymbol PhaseSymbol::compact_bump(cplx center, double radius) {
  if (radius <= 0.0) throw DomainError("compact_bump: radius must be positive");
  PhaseSymbol p;
  p.f_ = [center, radius](cplx z, double) {
    const double q = distance(z, center) / radius;
    return q < 1.0 ? cplx(std::exp(1.0 - 1.0 / (1.0 - q * q))) : cplx(0.0);
  };
  p.kind_ = Kind::localized;
  p.center_ = center;
  p.radius_ = radius;
  return p;
}

PhaseSymbol PhaseSymbol::general(Rule f, double sup) {
  PhaseSymbol p;
  p.f_ = std::move(f);
  p.sup_ = sup;
  return p;
}

PhaseSymbol PhaseSymbol::modulate(const Rule& factor, double factor_sup) const {
  PhaseSymbol p = *this;
  p.f_ = [f = f_, factor](cplx z, double b) { return f(z, b) * factor(z, b); };
  if (kind_ == Kind::constant) {
    p.kind_ = Kind::general;
    p.c_ = 0.0;
  }
  p.sup_ = sup_ * factor_sup;
  return p;
}

cplx PhaseSymbol::operator()(const MoebiusMap& g) const { return f_(g(0.0), std::arg(g(1.0))); }

LrValue L_r_quadrature(const PhaseSymbol& a, const MoebiusMap& g0, double r, const LrOptions& opt) {
  const MoebiusMap g = g0.to_disc();
  const cplx s = 0.5 + I * r;
  double U = 0.0;
  switch (a.kind()) {
    case PhaseSymbol::Kind::constant:
      if (r == 0.0) throw PoleError("L_r of a constant symbol has a pole at r = 0", 0.0, 1);
      U = 2.0;
      break;
    case PhaseSymbol::Kind::localized:
      // d(g n_u 0, g 0) = 2 asinh(|u|/2) bounds how far the horocycle has left the support
      U = 2.0 * std::sinh(0.5 * (a.radius() + distance(g(0.0), a.center())));
      break;
    case PhaseSymbol::Kind::general:
      U = opt.general_cutoff;
      break;
  }
  const auto integrand = [&](double u) { return std::exp(-s * std::log1p(u * u)) * a(g * horocycle_flow(u)); };
  const auto breaks = panel_breaks(U, r, opt.panel_cap);
  LrValue out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    for (double sign : {1.0, -1.0}) {
      const auto e = panel_integral([&](double u) { return integrand(sign * u); }, breaks[k], breaks[k + 1],
                                    opt.tol * std::max(a.sup(), 1e-300) * (breaks[k + 1] - breaks[k]));
      out.value += e.value;
      out.error += e.error;
    }
  if (a.kind() == PhaseSymbol::Kind::constant) out.value += 2.0 * a.constant_value() * constant_tail(s, U);
  if (a.kind() == PhaseSymbol::Kind::general) {
    // the tail of (1+u^2)^{-1/2-ir} only converges conditionally: it does not shrink with U
    out.tail_bound = a.sup() / std::abs(s);
    out.warning = "symbol has no decay data; integral truncated at |u| = " + std::to_string(U) +
                  ", truncation uncertainty up to " + std::to_string(out.tail_bound);
  }
  return out;
}

cplx stationary_phase_factor(double r) { return std::sqrt(cplx(0.0, -kPi / r)); }

cplx printed_stationary_phase_factor(double r) { return 1.0 / std::sqrt(cplx(0.0, -4.0 * kPi * r)); }

std::vector<StationaryPhasePoint> stationary_phase_sweep(const PhaseSymbol& a, const MoebiusMap& g,
                                                         const std::vector<double>& rs) {
  const cplx a0 = a(g.to_disc());
  if (std::abs(a0) == 0.0) throw DomainError("stationary phase sweep needs a(g) != 0");
  std::vector<StationaryPhasePoint> out(rs.size());
  parallel_for(rs.size(), [&](std::size_t k) {
    const double r = rs[k];
    const cplx lr = L_r_quadrature(a, g, r).value;
    const cplx kappa = stationary_phase_factor(r);
    out[k] = {r, lr / (kappa * a0), std::abs(lr / kappa - a0), lr / (printed_stationary_phase_factor(r) * a0)};
  });
  return out;
}

double fit_error_slope(const std::vector<StationaryPhasePoint>& pts) {
  if (pts.size() < 2) throw DomainError("slope fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    const double x = std::log(p.r), y = std::log(p.abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string sweep_csv(const std::vector<StationaryPhasePoint>& pts) {
  std::string out = "r,ratio_re,ratio_im,abs_error\n";
  char line[160];
  for (const auto& p : pts) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", p.r, p.ratio.real(), p.ratio.imag(), p.abs_error);
    out += line;
  }
  return out;
}

cplx horocycle_point(double b_minus, double b_plus, double t, double u) {
  return (frame(b_minus, b_plus, t) * horocycle_flow(u))(0.0);
}

CoordinatesReport coordinates_check(double b_minus, double b_plus, int samples, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pick(-2.0, 2.0);
  // eighth-order central differences
  constexpr std::array<double, 4> c{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const double h = 1e-2;
  const auto diff = [&](auto&& f) {
    cplx d = 0.0;
    for (int k = 0; k < 4; ++k) d += c[k] * (f((k + 1) * h) - f(-(k + 1) * h));
    return d / h;
  };
  CoordinatesReport rep;
  rep.samples = samples;
  for (int n = 0; n < samples; ++n) {
    const double t = pick(gen), u = pick(gen);
    const cplx z = horocycle_point(b_minus, b_plus, t, u);
    const double ch = cosh_dist_to_geodesic(DiscPoint(z), BoundaryPoint(b_minus), BoundaryPoint(b_plus));
    rep.cosh_error = std::max(rep.cosh_error, std::abs(ch - std::sqrt(1.0 + u * u)));
    const cplx zt = diff([&](double e) { return horocycle_point(b_minus, b_plus, t + e, u); });
    const cplx zu = diff([&](double e) { return horocycle_point(b_minus, b_plus, t, u + e); });
    const double area = std::abs(std::imag(std::conj(zt) * zu)) * 4.0 / std::pow(1.0 - std::norm(z), 2);
    rep.jacobian_error = std::max(rep.jacobian_error, std::abs(area - 1.0));
    // canonical frame (-1, 1) is (0, infinity) in the half-plane
    const cplx w = cayley_to_half_plane(horocycle_point(kPi, 0.0, t, u));
    const cplx expected = std::exp(t) * cplx(u, 1.0);
    rep.half_plane_error = std::max(rep.half_plane_error, std::abs(w - expected) / std::abs(expected));
  }
  return rep;
}

cplx lcal_polar(const PhaseSymbol& a, double b_minus, double b_plus, double r, double tol) {
  if (a.kind() != PhaseSymbol::Kind::localized) throw UnsupportedModeError("lcal_polar needs a localized symbol");
  const cplx c = a.center();
  const cplx expo = -(1.0 + 2.0 * I * r);
  const auto inner = [&](double phi) {
    const cplx dir = std::polar(1.0, phi);
    return quad::adaptive(
               [&](double rho) {
                 const cplx w = std::tanh(0.5 * rho) * dir;
                 const cplx z = (w + c) / (1.0 + std::conj(c) * w);
                 return a(z, b_plus) * std::exp(expo * std::log(cosh_to_geodesic(z, b_minus, b_plus))) * std::sinh(rho);
               },
               0.0, a.radius(), 0.01 * tol, 12)
        .value;
  };
  return quad::adaptive(inner, 0.0, kTwoPi, tol, 10).value;
}

cplx radon_of_L_r(const PhaseSymbol& a, double b_minus, double b_plus, double r, double tol) {
  if (a.kind() != PhaseSymbol::Kind::localized) throw UnsupportedModeError("radon_of_L_r needs a localized symbol");
  // in the half-plane frame the support has |t - log Im c| < R
  const cplx ch = cayley_to_half_plane(frame(b_minus, b_plus, 0.0).inverse()(a.center()));
  const double t0 = std::log(ch.imag());
  // composite Gauss-Legendre in t: the inner values carry ~1e-13 noise that defeats adaptive refinement
  static const quad::Rule rule = quad::gauss_legendre(20);
  const int panels = std::max(8, static_cast<int>(std::ceil(-std::log10(tol) * a.radius())));
  const double w = 2.0 * a.radius() / panels;
  cplx sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = t0 - a.radius() + k * w;
    sum += quad::fixed([&](double t) { return L_r_quadrature(a, frame(b_minus, b_plus, t), r).value; }, rule, lo, lo + w);
  }
  return sum;
}

cplx spectral_integral(const std::function<cplx(double)>& f, cplx s, double tol) {
  // algebraic decay suits the exp-sinh rule on each half line
  boost::math::quadrature::exp_sinh<double> rule;
  const auto half = [&](double sign) {
    return rule.integrate([&](double u) { return std::exp(-s * std::log1p(u * u)) * f(sign * u); }, tol);
  };
  return half(1.0) + half(-1.0);
}

DilationEigenfunction::DilationEigenfunction(double tau, int m, double period, std::map<int, Mode> modes)
    : tau_(tau), m_(m), period_(period), modes_(std::move(modes)) {
  if (period <= 0.0) throw DomainError("dilation period must be positive");
  if (m % 2 != 0) throw DomainError("weight must be even");
}

cplx DilationEigenfunction::profile(int k, double psi) const {
  const auto it = modes_.find(k);
  if (it == modes_.end()) return 0.0;
  if (psi <= 0.0 || psi >= kPi) throw DomainError("profile: psi must lie in (0, pi)");
  using State = std::array<cplx, 2>;
  namespace ode = boost::numeric::odeint;
  const double kappa = kTwoPi * k / period_;
  const double lambda = 0.25 + tau_ * tau_;
  const double m = m_;
  // sin^2 Phi'' + i m sin^2 Phi' + (m kappa sin cos - kappa^2 sin^2 + lambda) Phi = 0
  const auto rhs = [&](const State& y, State& dy, double x) {
    const double sn = std::sin(x), cs = std::cos(x);
    dy[0] = y[1];
    dy[1] = -I * m * y[1] - (m * kappa * cs / sn - kappa * kappa + lambda / (sn * sn)) * y[0];
  };
  State y{it->second.value, it->second.derivative};
  if (psi != 0.5 * kPi) {
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-14, 1e-14);
    ode::integrate_adaptive(stepper, rhs, y, 0.5 * kPi, psi, psi > 0.5 * kPi ? 1e-3 : -1e-3);
  }
  return y[0];
}

cplx DilationEigenfunction::operator()(cplx z) const {
  if (z.imag() <= 0.0) throw DomainError("dilation eigenfunction lives on the upper half-plane");
  const double rho = std::log(std::abs(z)), psi = std::arg(z);
  cplx sum = 0.0;
  for (const auto& [k, mode] : modes_) sum += mode.coefficient * std::exp(I * (kTwoPi * k / period_) * rho) * profile(k, psi);
  return sum;
}

cplx orbit_integral(const DilationEigenfunction& sigma, double u) {
  // periodic trapezoid: exact for the Fourier modes present
  constexpr int n = 64;
  const double L = sigma.period();
  cplx sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = L * j / n;
    sum += sigma(std::exp(t) * cplx(u, 1.0));
  }
  return sum * (L / n);
}

double orbit_ode_residual(const std::function<cplx(double)>& f, double tau, int m, double u, double h) {
  const cplx fm2 = f(u - 2 * h), fm1 = f(u - h), f0 = f(u), fp1 = f(u + h), fp2 = f(u + 2 * h);
  const cplx d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  const cplx d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
  const cplx res = (1.0 + u * u) * d2 + (2.0 * u - I * double(m)) * d1 + (0.25 + tau * tau) * f0;
  return std::abs(res) / std::max(std::abs(f0), std::abs(d1));
}

}  // namespace hz
