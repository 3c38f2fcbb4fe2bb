#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hz/hyperbolic_core.hpp"

namespace hz {

/// z -> e^{(1/2 + i r) <z, b>}.
struct PlaneWave {
  double r = 0.0;
  BoundaryPoint b;
  cplx operator()(cplx z) const;
};

/// Symbol a(z, b, r) for the Op rule.
using WaveSymbol = std::function<cplx(cplx z, double b, double r)>;

/// Op(a) acting on a plane wave: the pointwise product a(z, b, r) e_{r,b}(z).
std::function<cplx(cplx)> op_on_plane_wave(const WaveSymbol& a, const PlaneWave& wave);

/// (T_gamma f)(z) = f(gamma^{-1} z).
std::function<cplx(cplx)> translate(const MoebiusMap& gamma, std::function<cplx(cplx)> f);

/**
 * |Op(a) T_gamma e(z) - T_gamma Op(a) e(z)| at z. T_gamma e_{r,b} is expanded as
 * e^{-(1/2+ir)<gamma 0, gamma b>} e_{r, gamma b}, so the left side only evaluates a at gamma b.
 */
double equivariance_defect(const WaveSymbol& a, const PlaneWave& wave, const MoebiusMap& gamma, cplx z);

/**
 * Function on the unit tangent bundle in (base point z, forward endpoint b) coordinates:
 * the element g stands for (g(0), arg g(1)). Carries the decay information L_r needs.
 */
class PhaseSymbol {
 public:
  using Rule = std::function<cplx(cplx z, double b)>;
  enum class Kind { constant, localized, general };

  static PhaseSymbol constant(cplx c = 1.0);
  /// exp(-d(z, center)^2 / width^2).
  static PhaseSymbol gaussian_bump(cplx center, double width = 1.0);
  /// exp(1 - 1/(1 - (d/R)^2)) for d = d(z, center) < R, zero outside.
  static PhaseSymbol compact_bump(cplx center, double radius);
  /// No decay information: L_r truncates and warns.
  static PhaseSymbol general(Rule f, double sup);

  /// Multiplies by a bounded factor, keeping the support data.
  PhaseSymbol modulate(const Rule& factor, double factor_sup = 1.0) const;

  cplx operator()(cplx z, double b) const { return f_(z, b); }
  cplx operator()(const MoebiusMap& g) const;
  Kind kind() const { return kind_; }
  cplx center() const { return center_; }
  /// Beyond this distance from center the symbol is zero or below 1e-18.
  double radius() const { return radius_; }
  double sup() const { return sup_; }
  cplx constant_value() const { return c_; }

 private:
  Rule f_;
  Kind kind_ = Kind::general;
  cplx center_ = 0.0;
  double radius_ = 0.0;
  double sup_ = 1.0;
  cplx c_ = 0.0;
};

struct LrOptions {
  double panel_cap = 0.5;
  double tol = 1e-12;
  double general_cutoff = 200.0;  // |u| cutoff for symbols without decay data
};

struct LrValue {
  cplx value;
  double error = 0.0;       // summed panel estimates
  double tail_bound = 0.0;  // nonzero only for truncated general symbols
  std::string warning;
};

/**
 * L_r a(g) = int (1 + u^2)^{-(1/2 + ir)} a(g n_u) du.
 * Panels are at most pi/(4 r w(u)) wide, w the local phase rate (w <= 1, w = 2|u|/(1+u^2) for
 * |u| > 1). Constant symbols use the exact tail beyond |u| = 2 (incomplete Beta series).
 */
LrValue L_r_quadrature(const PhaseSymbol& a, const MoebiusMap& g, double r, const LrOptions& opt = {});

/// (-i pi / r)^{1/2}: the actual stationary-phase factor of L_r.
cplx stationary_phase_factor(double r);
/// (-4 i pi r)^{-1/2}, as printed; equals the factor above divided by -2 pi i.
cplx printed_stationary_phase_factor(double r);

struct StationaryPhasePoint {
  double r = 0.0;
  cplx ratio;          // L_r a(g) / (factor a(g))
  double abs_error;    // |L_r a(g) / factor - a(g)|
  cplx printed_ratio;  // L_r a(g) / (printed factor a(g))
};

std::vector<StationaryPhasePoint> stationary_phase_sweep(const PhaseSymbol& a, const MoebiusMap& g,
                                                         const std::vector<double>& rs);
/// Least-squares slope of log abs_error against log r.
double fit_error_slope(const std::vector<StationaryPhasePoint>& pts);
/// CSV block with columns r, ratio_re, ratio_im, abs_error (no metadata lines).
std::string sweep_csv(const std::vector<StationaryPhasePoint>& pts);

/// (g(b', b) a_t n_u)(0).
cplx horocycle_point(double b_minus, double b_plus, double t, double u);

struct CoordinatesReport {
  int samples = 0;
  double cosh_error = 0.0;        // max |cosh s(t,u) - sqrt(1 + u^2)|
  double jacobian_error = 0.0;    // max |dVol/(dt du) - 1|
  double half_plane_error = 0.0;  // max |Cayley image of a_t n_u 0 - e^t (i + u)|
};

/// Random (t, u) in [-2, 2]^2.
CoordinatesReport coordinates_check(double b_minus, double b_plus, int samples, unsigned seed = 7);

/// int_D a(z, b) cosh s_{b',b}(z)^{-(1 + 2ir)} dVol in hyperbolic polar coordinates about the symbol center.
cplx lcal_polar(const PhaseSymbol& a, double b_minus, double b_plus, double r, double tol = 1e-10);
/// int dt L_r a(g(b', b) a_t) by nested quadrature.
cplx radon_of_L_r(const PhaseSymbol& a, double b_minus, double b_plus, double r, double tol = 1e-10);

/// int_R (1 + u^2)^{-s} f(u) du over the whole line.
cplx spectral_integral(const std::function<cplx(double)>& f, cplx s, double tol = 1e-12);

/**
 * Weight-m eigenfunction of y^2 (dx^2 + dy^2) - i m y dx with eigenvalue -(1/4 + tau^2) on the
 * upper half-plane, periodic under z -> e^L z:
 *   f(z) = sum_k c_k e^{2 pi i k rho / L} Phi_k(psi),  z = e^{rho + i psi}.
 * Each Phi_k is integrated from psi = pi/2 with the given initial data.
 */
class DilationEigenfunction {
 public:
  struct Mode {
    cplx coefficient;
    cplx value;       // Phi_k(pi/2)
    cplx derivative;  // Phi_k'(pi/2)
  };

  DilationEigenfunction(double tau, int m, double period, std::map<int, Mode> modes);

  cplx operator()(cplx z) const;
  double tau() const { return tau_; }
  int weight() const { return m_; }
  double period() const { return period_; }

  /// Phi_k(psi) by adaptive Dormand-Prince.
  cplx profile(int k, double psi) const;

 private:
  double tau_;
  int m_;
  double period_;
  std::map<int, Mode> modes_;
};

/// Periodic orbit integral I(u) = int_0^L sigma(a_t n_u) dt, i.e. of sigma(e^t (u + i)).
cplx orbit_integral(const DilationEigenfunction& sigma, double u);

/// Residual of (1+u^2) f'' + (2u - i m) f' + (1/4 + tau^2) f by central differences, relative to max(|f|, |f'|).
double orbit_ode_residual(const std::function<cplx(double)>& f, double tau, int m, double u, double h = 1e-3);

}  // namespace hz
