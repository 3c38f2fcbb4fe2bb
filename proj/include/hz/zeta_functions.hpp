#pragma once

#include <string>
#include <vector>

#include "hz/boundary_coding.hpp"
#include "hz/observable.hpp"
#include "hz/transfer_operator.hpp"

namespace hz {

/// Oriented closed orbit with its primitive observable integral.
struct OrbitTerm {
  double length = 0.0;            // full length (multiplicity * primitive)
  double primitive_length = 0.0;
  int multiplicity = 1;
  double observable_integral = 0.0;  // over the primitive orbit, sum of A at its boundary points
};

/// All oriented closed orbits with L <= L_max, iterates included, with counting-fit data for tails.
class OrbitSpectrum {
 public:
  OrbitSpectrum(const MarkovPartition& p, double L_max, const Observable& a = Observable::constant());

  double L_max() const { return L_max_; }
  const std::vector<OrbitTerm>& terms() const { return terms_; }
  const std::string& observable_id() const { return observable_id_; }
  /// Fitted growth exponent h of #{primitive L <= x} ~ C e^{hx}, before the safety factor.
  double counting_exponent() const { return h_; }
  double counting_constant() const { return c_; }
  /// sup |observable integral| / primitive length over the enumerated orbits.
  double observable_density() const { return density_; }

  /// Heuristic bound for sum over primitive orbits with L > L_max of (1 + L density) L^k e^{-sigma L},
  /// using exponent 1.1 h; infinite if sigma <= 1.1 h.
  double tail(double sigma, bool with_observable) const;

 private:
  double L_max_;
  std::string observable_id_;
  std::vector<OrbitTerm> terms_;
  double h_ = 0.0, c_ = 0.0, density_ = 0.0;
};

struct ZetaValue {
  cplx value;
  double L_max = 0.0;
  double tail_bound = 0.0;  // heuristic
  bool certified = true;
  std::string warning;
};

enum class ZetaMode { certified, exploratory };

/// sum_gamma e^{-sL}/(1 - e^{-L}) int_{gamma0} a. Certified mode refuses Re s <= 1.
ZetaValue zeta(cplx s, const OrbitSpectrum& spec, ZetaMode mode = ZetaMode::certified);
/// sum_gamma e^{-(s-1)L}/sinh^2(L/2) int_{gamma0} a.
ZetaValue zeta2(cplx s, const OrbitSpectrum& spec, ZetaMode mode = ZetaMode::certified);
/// sum_gamma (int_{gamma0} sigma / sinh(L/2)) tanh(L/2)^{m/2} cosh(L/2)^{-2(s-1/2)}.
ZetaValue rcal(cplx s, int m, const OrbitSpectrum& spec, ZetaMode mode = ZetaMode::certified);

/// Coefficients of (2y(1 - sqrt(1 - 1/y)))^{2s-1} = sum_n B(s,n) y^{-n}, n = 0..n_max.
std::vector<cplx> recoupling_coefficients(cplx s, int n_max);
cplx recoupling_B(cplx s, int n);

struct LogValue {
  cplx log_value;
  double tail_bound = 0.0;
  int terms = 0;
};

/// log of prod over primitive oriented orbits (L <= L_max) of prod_{m>=0} (1 - e^{-(s+m)L}).
LogValue log_euler_product(cplx s, const OrbitSpectrum& spec);
/// Same for the double product prod_{m,n>=0} (1 - e^{-(s+m+n)L}).
LogValue log_euler_product_double(cplx s, const OrbitSpectrum& spec);
/// -sum_{n<=n_max} (1/n) sum_{F^n x = x} e^{-sL}/(1 - e^{-L}); tail from Tr A^n and the per-letter
/// displacement bound. n_max = 0 picks the smallest order with tail below `target`.
LogValue log_orbit_sum_exponential(cplx s, const MarkovPartition& p, int n_max = 0, double target = 1e-9);

/// -4 sum_{n>=0} d/dz log d(s+n, z)|_{z=0}: the continuation of zeta2 through the determinant.
cplx zeta2_via_determinant(cplx s, const TransferOperator& op);
/// -d/dz log d(s, z)|_{z=0}: the continuation of zeta.
cplx zeta_via_determinant(cplx s, const TransferOperator& op);

struct ContourResidue {
  cplx value;
  double radius = 0.0;
  int points = 0;
  double discrepancy = 0.0;  // between the full and half point sets
};

/// Residue of zeta2 at a zero s_n of d by the trapezoid rule on a circle.
ContourResidue zeta2_residue(cplx s_n, const TransferOperator& op, double radius = 0.2, int points = 64);

}  // namespace hz
