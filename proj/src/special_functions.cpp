#include "hz/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace hz {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

constexpr std::array<double, 9> kLanczos{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

void check_pole(cplx z) {
  if (z.real() <= 0.5 && std::abs(z.imag()) < 1e-14) {
    const double n = std::round(z.real());
    if (n <= 0.0 && std::abs(z.real() - n) < 1e-14)
      throw PoleError("gamma pole at z = " + std::to_string(n), n, 1);
  }
}

}  // namespace

SpectralParameter::SpectralParameter(cplx s_, cplx tau_, int m_) : s(s_), tau(tau_), m(m_) {
  if (m % 2 != 0) throw DomainError("SpectralParameter: weight m must be even");
}

SpectralParameter SpectralParameter::from_r(cplx r, cplx tau, int m) {
  return SpectralParameter(0.5 + I * r, tau, m);
}

cplx SpectralParameter::r() const { return (s - 0.5) / I; }

cplx gamma_complex(cplx z) {
  check_pole(z);
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_complex(1.0 - z));
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

cplx digamma(cplx z) {
  check_pole(z);
  if (z.real() < 0.5) return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  cplx acc = 0.0;
  while (std::abs(z) < 12.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const cplx w = 1.0 / (z * z);
  // Bernoulli tail B_{2k}/(2k z^{2k}), k = 1..7
  const cplx tail =
      w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w * (1.0 / 132 - w * (691.0 / 32760 - w / 12.0))))));
  return acc + std::log(z) - 0.5 / z - tail;
}

cplx beta(cplx x, cplx y) { return gamma_complex(x) * gamma_complex(y) / gamma_complex(x + y); }

cplx log_gamma_complex(cplx z) {
  check_pole(z);
  if (z.real() < 0.5) {
    // log sin(pi z) without overflow: sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z >= 0
    const bool upper = z.imag() >= 0.0;
    const cplx w = upper ? z : std::conj(z);
    cplx log_sin = -I * kPi * w + std::log(0.5 * I) + std::log(1.0 - std::exp(2.0 * I * kPi * w));
    if (!upper) log_sin = std::conj(log_sin);
    return std::log(kPi) - log_sin - log_gamma_complex(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx mu0(cplx s) {
  // the Gamma values themselves underflow far up the critical line
  if (std::abs(s.imag()) > 30.0) return std::exp(log_gamma_complex(0.5) + log_gamma_complex(s - 0.5) - log_gamma_complex(s));
  return gamma_complex(0.5) * gamma_complex(s - 0.5) / gamma_complex(s);
}

cplx mu_c(cplx r, cplx s) {
  const cplx g = gamma_complex(s);
  return gamma_complex(0.5) * gamma_complex(s - 0.25 + 0.5 * I * r) *
         gamma_complex(s - 0.25 - 0.5 * I * r) / (g * g);
}

cplx mu_d(int m, cplx s) {
  if (m % 2 != 0) throw DomainError("mu_d: weight must be even");
  const double h = 0.5 * m;
  const cplx pre = std::pow(-I, m / 2) * kPi * std::pow(cplx(2.0), 2.0 * s + 2.0 - h);
  return pre * gamma_complex(-2.0 * s + h) /
         (-(2.0 * s + 1.0 - h) * gamma_complex(-s) * gamma_complex(-s + h));
}

cplx cosh_power_fourier(cplx s, cplx r) {
  return std::pow(cplx(2.0), 2.0 * s - 2.0) * gamma_complex(s - 0.5 - I * r) *
         gamma_complex(s - 0.5 + I * r) / gamma_complex(2.0 * s - 1.0);
}

cplx hyp2f1_series(cplx a, cplx b, cplx c, cplx x) {
  if (std::abs(x) >= 1.0) throw DomainError("hyp2f1_series: |x| must be < 1");
  cplx term = 1.0, sum = 1.0;
  int quiet = 0;
  for (int n = 0; n < 200000; ++n) {
    const double dn = n;
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * x;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++quiet == 3) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("hyp2f1_series: no convergence");
}

namespace {

// F(a, b; c; -u^2) for the conjugate pair a, b = base +- i tau/2, u >= 0.
HypValue hyp_pair(cplx base, cplx tau, cplx c, double u) {
  const cplx a = base + 0.5 * I * tau, b = base - 0.5 * I * tau;
  const double u2 = u * u;
  if (u <= 0.8) return {hyp2f1_series(a, b, c, -u2)};
  if (u <= 1.5) {
    // Pfaff: F(a,b;c;x) = (1-x)^{-a} F(a, c-b; c; x/(x-1))
    return {std::pow(cplx(1.0 + u2), -a) * hyp2f1_series(a, c - b, c, u2 / (1.0 + u2))};
  }
  const double logu2 = 2.0 * std::log(u);
  const double inv = -1.0 / u2;
  if (std::abs(tau) >= 1e-6) {
    const cplx gc = gamma_complex(c);
    const cplx t1 = gc * gamma_complex(b - a) / (gamma_complex(b) * gamma_complex(c - a)) *
                    std::exp(-a * logu2) * hyp2f1_series(a, a - c + 1.0, a - b + 1.0, inv);
    const cplx t2 = gc * gamma_complex(a - b) / (gamma_complex(a) * gamma_complex(c - b)) *
                    std::exp(-b * logu2) * hyp2f1_series(b, b - c + 1.0, b - a + 1.0, inv);
    return {t1 + t2};
  }
  // a = b: logarithmic connection series
  const cplx al = base;
  cplx psi_k1 = digamma(1.0), psi_ak = digamma(al), psi_cak = digamma(c - al);
  cplx coef = 1.0, sum = 0.0;
  int quiet = 0;
  for (int k = 0; k < 10000; ++k) {
    const cplx term = coef * (logu2 + 2.0 * psi_k1 - psi_ak - psi_cak);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
    const double dk = k;
    coef *= (al + dk) * (1.0 - c + al + dk) / ((dk + 1.0) * (dk + 1.0)) * inv;
    psi_k1 += 1.0 / (dk + 1.0);
    psi_ak += 1.0 / (al + dk);
    psi_cak -= 1.0 / (c - al - dk - 1.0);
  }
  const cplx pre = gamma_complex(c) * std::exp(-al * logu2) / (gamma_complex(al) * gamma_complex(c - al));
  return {pre * sum, true};
}

}  // namespace

HypValue hyp_even_ex(cplx tau, double u) {
  if (std::abs(tau.imag()) >= 0.5) throw DomainError("hyp_even: |Im tau| must be < 1/2");
  return hyp_pair(0.25, tau, 0.5, std::abs(u));
}

HypValue hyp_odd_ex(cplx tau, double u) {
  if (std::abs(tau.imag()) >= 0.5) throw DomainError("hyp_odd: |Im tau| must be < 1/2");
  HypValue v = hyp_pair(0.75, tau, 1.5, std::abs(u));
  v.value *= u;
  return v;
}

cplx discrete_solution(int m, double u) {
  if (m < 2 || m % 2 != 0) throw DomainError("discrete_solution: m must be even and >= 2");
  return std::pow(-I, -m / 2) * std::pow(cplx(u, 1.0), -m / 2);
}

}  // namespace hz
