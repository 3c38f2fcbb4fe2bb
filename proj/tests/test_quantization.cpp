#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hz/quantization.hpp"
#include "hz/special_functions.hpp"
#include "test_support.hpp"

using namespace hz;
using testing::reference_group;

namespace {

constexpr cplx I{0.0, 1.0};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Attracting and repelling fixed points of a hyperbolic disc map.
std::pair<double, double> fixed_angles(const MoebiusMap& g) {
  const cplx a = g.a(), b = g.b(), c = g.c(), d = g.d();
  const cplx disc = std::sqrt((d - a) * (d - a) + 4.0 * b * c);
  const cplx z1 = (a - d + disc) / (2.0 * c), z2 = (a - d - disc) / (2.0 * c);
  return {std::arg(z1), std::arg(z2)};
}

cplx cross_ratio(cplx z, cplx b, cplx b1, cplx b2) { return (z - b1) * (b - b2) / ((z - b2) * (b - b1)); }

double cosh_axis(cplx z, double t1, double t2) {
  return cosh_dist_to_geodesic(DiscPoint(z), BoundaryPoint(t1), BoundaryPoint(t2));
}

}  // namespace

TEST_CASE("plane waves and the Op rule") {
  testing::Sampler rnd(11);
  for (int k = 0; k < 20; ++k) {
    const PlaneWave e{rnd.uniform(-10.0, 10.0), rnd.boundary()};
    CHECK(std::abs(std::abs(e(0.0)) - 1.0) < 1e-15);
    const cplx z = rnd.disc(0.9).z();
    const WaveSymbol one = [](cplx, double, double) { return cplx(1.0); };
    CHECK(op_on_plane_wave(one, e)(z) == e(z));
    const WaveSymbol p = [](cplx w, double b, double r) { return w * std::cos(b) + r; };
    const WaveSymbol q = [](cplx w, double, double) { return std::exp(I * w.real()); };
    const WaveSymbol lin = [&](cplx w, double b, double r) { return 2.0 * p(w, b, r) - I * q(w, b, r); };
    CHECK(std::abs(op_on_plane_wave(lin, e)(z) - (2.0 * op_on_plane_wave(p, e)(z) - I * op_on_plane_wave(q, e)(z))) <
          1e-13);
  }
}

TEST_CASE("Op commutes with the group action for invariant symbols") {
  const MoebiusMap gamma = reference_group().matrix(0) * reference_group().matrix(2);
  const auto [t1, t2] = fixed_angles(gamma);
  const cplx b1 = std::polar(1.0, t1), b2 = std::polar(1.0, t2);
  const std::vector<WaveSymbol> invariant{
      [=](cplx z, double, double r) { return cplx(1.0 / cosh_axis(z, t1, t2)) * (1.0 + 0.1 * r); },
      [=](cplx z, double b, double) { return std::exp(-std::abs(cross_ratio(z, std::polar(1.0, b), b1, b2))); },
      [=](cplx z, double b, double r) {
        const cplx cr = cross_ratio(z, std::polar(1.0, b), b1, b2);
        return std::cos(std::arg(cr)) / cosh_axis(z, t1, t2) + I * std::sin(r) * std::exp(-std::norm(cr));
      }};
  testing::Sampler rnd(3);
  for (const auto& a : invariant)
    for (int k = 0; k < 25; ++k) {
      const PlaneWave e{rnd.uniform(-6.0, 6.0), rnd.boundary()};
      const cplx z = rnd.disc(0.6).z();
      const double scale = std::abs(op_on_plane_wave(a, e)(gamma.inverse()(z)));
      CHECK(equivariance_defect(a, e, gamma, z) <= 1e-9 * std::max(scale, 1e-3));
    }
  // a symbol that only sees the Euclidean position is not invariant
  const WaveSymbol euclid = [](cplx z, double, double) { return cplx(z.real()); };
  CHECK(equivariance_defect(euclid, PlaneWave{1.0, BoundaryPoint(0.4)}, gamma, 0.3) > 1e-3);
  // translated plane waves are plane waves
  const PlaneWave e{2.5, BoundaryPoint(1.1)};
  const BoundaryPoint gb = BoundaryPoint::from_complex(gamma(e.b.point()));
  const cplx factor = std::exp(-(0.5 + 2.5 * I) * busemann(DiscPoint(gamma(0.0)), gb));
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3), cplx(0.0, -0.7)})
    CHECK(rel(translate(gamma, e)(z), factor * PlaneWave{2.5, gb}(z)) < 1e-10);
}

TEST_CASE("L_r of the constant symbol is mu0") {
  const MoebiusMap g = frame_to_group({BoundaryPoint(2.0), BoundaryPoint(0.3), 0.4});
  for (double r : {3.0, 0.7, 20.0, 160.0, 640.0}) {
    const auto v = L_r_quadrature(PhaseSymbol::constant(), g, r);
    CHECK(v.warning.empty());
    CHECK(rel(v.value, mu0(0.5 + I * r)) < 1e-8);
  }
  CHECK(rel(L_r_quadrature(PhaseSymbol::constant(2.0), MoebiusMap::identity(), 3.0).value, 2.0 * mu0(0.5 + 3.0 * I)) <
        1e-8);
  CHECK_THROWS_AS(L_r_quadrature(PhaseSymbol::constant(), g, 0.0), PoleError);
}

TEST_CASE("conjugation symmetry and truncation warnings") {
  const MoebiusMap g = frame_to_group({BoundaryPoint(2.5), BoundaryPoint(0.1), -0.3});
  const PhaseSymbol a = PhaseSymbol::gaussian_bump(0.2 * std::polar(1.0, 0.5), 1.2)
                            .modulate([](cplx z, double b) { return cplx(1.0 + 0.5 * z.real() * std::cos(b)); }, 1.5);
  for (double r : {1.0, 4.5, 30.0}) {
    const cplx plus = L_r_quadrature(a, g, r).value, minus = L_r_quadrature(a, g, -r).value;
    CHECK(std::abs(minus - std::conj(plus)) < 1e-13 * std::abs(plus));
  }
  const auto general = L_r_quadrature(PhaseSymbol::general([](cplx z, double) { return cplx(1.0 + z.real()); }, 2.0), g, 3.0);
  CHECK(!general.warning.empty());
  CHECK(general.tail_bound > 0.0);
}

TEST_CASE("stationary phase leading order") {
  const MoebiusMap g = frame_to_group({BoundaryPoint(2.0), BoundaryPoint(0.3), 0.4});
  const PhaseSymbol a = PhaseSymbol::gaussian_bump(g(0.0) * 0.5 + 0.1, 1.0);
  const auto pts = stationary_phase_sweep(a, g, {20, 40, 80, 160, 320, 640});
  const double slope = fit_error_slope(pts);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(std::abs(pts.back().ratio - 1.0) < 1e-2);
  for (const auto& p : pts) CHECK(rel(p.printed_ratio, p.ratio * (-2.0 * std::numbers::pi * I)) < 1e-12);
  const std::string csv = sweep_csv(pts);
  CHECK(csv.rfind("r,ratio_re,ratio_im,abs_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  // constant symbol: mu0 itself carries the same leading factor
  const cplx m = mu0(0.5 + 640.0 * I) / stationary_phase_factor(640.0);
  CHECK(std::abs(m - 1.0) < 1e-3);
}

TEST_CASE("horocyclic coordinates") {
  const auto rep = coordinates_check(2.3, 0.4, 200);
  CHECK(rep.cosh_error < 1e-10);
  CHECK(rep.jacobian_error < 1e-10);
  CHECK(rep.half_plane_error < 1e-12);
  const auto rep2 = coordinates_check(5.9, 3.0, 200, 99);
  CHECK(rep2.cosh_error < 1e-10);
  CHECK(rep2.jacobian_error < 1e-10);
  for (double t : {-1.0, 0.0, 2.0})
    CHECK(cosh_axis(horocycle_point(2.3, 0.4, t, 0.0), 2.3, 0.4) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("disc integral equals the Radon transform of L_r") {
  const double bm = 2.6, bp = 0.2;
  const std::vector<PhaseSymbol> symbols{
      PhaseSymbol::compact_bump(cplx(0.1, 0.2), 1.5),
      PhaseSymbol::compact_bump(cplx(-0.2, 0.1), 1.2).modulate([](cplx, double b) { return cplx(std::cos(b)); }),
      PhaseSymbol::compact_bump(cplx(0.3, -0.1), 1.0).modulate([](cplx z, double) { return cplx(1.0 + z.real()); }, 2.0),
      PhaseSymbol::compact_bump(cplx(0.0, 0.35), 1.3).modulate([](cplx, double b) { return std::exp(2.0 * I * b); }),
      PhaseSymbol::gaussian_bump(cplx(0.15, 0.0), 0.6).modulate([](cplx z, double) { return cplx(std::norm(z)); })};
  for (const auto& a : symbols)
    for (double r : {0.0, 2.0}) {
      const cplx polar = lcal_polar(a, bm, bp, r);
      const cplx nested = radon_of_L_r(a, bm, bp, r);
      CHECK(rel(nested, polar) < 1e-6);
    }
  CHECK_THROWS_AS(lcal_polar(PhaseSymbol::constant(), bm, bp, 1.0), UnsupportedModeError);
}

TEST_CASE("horocyclic integrals of the hypergeometric solutions") {
  for (double tau : {0.0, 1.5, 4.0})
    for (double s : {0.9, 1.5, 2.3}) {
      const cplx q = spectral_integral([tau](double u) { return hyp_even(tau, u); }, s);
      CHECK(rel(q, mu_c(tau, s)) < 1e-8);
    }
  CHECK(rel(spectral_integral([](double) { return cplx(1.0); }, 1.3), mu0(1.3)) < 1e-10);
}

TEST_CASE("periodic orbit integrals solve the horocyclic ODE") {
  const double L = 2.633915793849633;
  const double tau = 1.7;
  using Mode = DilationEigenfunction::Mode;
  for (int m : {0, 2, -4}) {
    const DilationEigenfunction sigma(tau, m, L,
                                      {{0, Mode{1.0, 1.0, 0.3}}, {1, Mode{0.5, 0.7, -0.2 * I}}, {-2, Mode{0.25 * I, 0.4, 0.1}}});
    // sigma is an eigenfunction of the weight-m Laplacian (independent 2D check)
    const double h = 2e-3;
    // fourth-order central differences
    const auto d1 = [&](cplx z, cplx e) {
      return (sigma(z - 2.0 * e) - 8.0 * sigma(z - e) + 8.0 * sigma(z + e) - sigma(z + 2.0 * e)) / (12.0 * h);
    };
    const auto d2 = [&](cplx z, cplx e) {
      return (-sigma(z - 2.0 * e) + 16.0 * sigma(z - e) - 30.0 * sigma(z) + 16.0 * sigma(z + e) - sigma(z + 2.0 * e)) /
             (12.0 * h * h);
    };
    for (cplx z : {cplx(0.3, 1.1), cplx(-1.2, 0.7), cplx(2.0, 3.0)}) {
      const double y = z.imag();
      const cplx lap = y * y * (d2(z, h) + d2(z, I * h)) - I * double(m) * y * d1(z, h);
      CHECK(std::abs(lap + (0.25 + tau * tau) * sigma(z)) < 1e-6 * std::abs(sigma(z)));
    }
    const auto orbit = [&](double u) { return orbit_integral(sigma, u); };
    for (double u : {-1.5, -0.3, 0.4, 1.2}) CHECK(orbit_ode_residual(orbit, tau, m, u, 1e-2) < 1e-6);
    // a wrong spectral parameter is visible
    CHECK(orbit_ode_residual(orbit, tau + 0.3, m, 0.4, 1e-2) > 1e-3);
  }
  // weight 0: the integral is a combination of the even and odd hypergeometric solutions
  const DilationEigenfunction sigma0(tau, 0, L, {{0, Mode{1.0, 1.0, 0.3}}, {3, Mode{2.0, 1.0, 1.0}}});
  for (double u : {-2.0, -0.5, 0.0, 0.8, 2.5}) {
    const cplx expected = L * (hyp_even(tau, u) - 0.3 * hyp_odd(tau, u));
    CHECK(rel(orbit_integral(sigma0, u), expected) < 1e-10);
  }
}
