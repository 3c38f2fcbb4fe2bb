#pragma once

#include <complex>

#include "hz/errors.hpp"

namespace hz {

using cplx = std::complex<double>;

/// s = 1/2 + i r, Casimir parameter tau and even weight m.
struct SpectralParameter {
  cplx s;
  cplx tau;
  int m = 0;

  SpectralParameter(cplx s, cplx tau = 0.0, int m = 0);
  static SpectralParameter from_r(cplx r, cplx tau = 0.0, int m = 0);
  cplx r() const;
};

/// Lanczos (g = 7, 9 terms) with reflection for Re z < 1/2. Throws PoleError at z = 0, -1, -2, ...
cplx gamma_complex(cplx z);
/// A logarithm of Gamma (not necessarily the principal branch); safe for large |Im z|.
cplx log_gamma_complex(cplx z);
cplx digamma(cplx z);
cplx beta(cplx x, cplx y);

cplx mu0(cplx s);
cplx mu_c(cplx r, cplx s);
cplx mu_d(int m, cplx s);

/// Closed form of the Fourier transform of cosh^{-(2s-1)}: int e^{2irt} cosh(t)^{1-2s} dt.
cplx cosh_power_fourier(cplx s, cplx r);

struct HypValue {
  cplx value;
  bool log_branch = false;  // degenerate connection (tau ~ 0) evaluated by the logarithmic series
};

/// F(1/4 + i tau/2, 1/4 - i tau/2; 1/2; -u^2).
HypValue hyp_even_ex(cplx tau, double u);
/// u F(3/4 + i tau/2, 3/4 - i tau/2; 3/2; -u^2), derivative 1 at u = 0.
HypValue hyp_odd_ex(cplx tau, double u);
inline cplx hyp_even(cplx tau, double u) { return hyp_even_ex(tau, u).value; }
inline cplx hyp_odd(cplx tau, double u) { return hyp_odd_ex(tau, u).value; }

/// Gauss series for |x| < 1.
cplx hyp2f1_series(cplx a, cplx b, cplx c, cplx x);

/// (-i)^{-m/2} (u + i)^{-m/2}, m even and >= 2.
cplx discrete_solution(int m, double u);

}  // namespace hz
