#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hz/transfer_operator.hpp"

namespace hz {

/**
 * Boundary functional T at a resonance, as quadrature weights on the collocation grid:
 * T(f) ~ sum_k weights[k] f(theta_k). Weights are the left eigenvector of L_{s,0}
 * scaled to total mass 1.
 */
struct BoundaryFunctional {
  cplx s;
  MarkovPartition partition;
  CollocationGrid grid;
  Eigen::VectorXcd weights;
  Eigen::VectorXcd eigenfunction;  // right eigenvector on the grid
  double certificate = 0.0;        // spread of the eigenfunction against its reconstruction from T
  bool formal = false;             // nonreal s: no positivity or measure interpretation
};

/// Extracts T at a simple resonance and certifies it (ConvergenceError if the certificate exceeds 1e-6).
BoundaryFunctional boundary_values(const TransferOperator& op, cplx s_n);

/// T(f).
cplx integrate(const BoundaryFunctional& t, const std::function<cplx(double)>& f);

/// |T(f o g_i |g_i'|^s on the admissible domain) - T(f 1_{I_i})| / |T(f 1_{I_i})| for the branch of interval i.
double conformal_residual(const BoundaryFunctional& t, int interval, const std::function<cplx(double)>& f);

/// Masses of the forward cylinders of the given depth; keys are interval words.
std::map<std::vector<int>, cplx> cylinder_masses(const BoundaryFunctional& t, int depth);

/// int_lo^hi a(b', b, sigma - horocycle_offset(b', b)) dsigma: sigma is the horocycle time toward b.
double radon(const Observable& a, double b_minus, double b_plus, double lo, double hi);

struct Pairing {
  cplx ps_pair_a;
  cplx ps_pair_1;
  cplx ratio() const { return ps_pair_a / ps_pair_1; }
};

/// Forward node y = G_{c1} ... G_{cd} y'' with y'' on the grid; `word` lists the intervals
/// of y, F y, ..., F^d y.
struct ForwardNode {
  double theta = 0.0;
  cplx weight;
  std::vector<int> word;
};

/// Rectangle integrand: the window integral of the observable for backward point x and forward node y.
using PairingIntegrand = std::function<double(double x, const ForwardNode& y)>;

/// sum over off-diagonal rectangles of T(dx) T(dy) integrand / |x - y|^{2s}, y refined to `depth`.
cplx pair_rectangles(const BoundaryFunctional& t, const PairingIntegrand& integrand, int depth);

/// Pairing of a over the section windows (0, tau(y)).
Pairing ps_pair(const Observable& a, const BoundaryFunctional& t, int depth = 1);

/**
 * Pairing over shifted section windows (phi(y), tau(y) + phi(F y)) where phi is constant on
 * two-letter cylinders: phi(y) = shift[{interval of y, interval of F y}]. Past tau(y) the
 * observable continues as f(F y, sigma - tau(y)).
 */
Pairing ps_pair_shifted(const Observable& a, const BoundaryFunctional& t,
                        const std::map<std::pair<int, int>, double>& shift);

/// JSON record {resonance, observable_id, ps_pair_a, ps_pair_1, ratio, det_route_ratio, discrepancy}.
std::string pairing_report_json(const std::string& observable_id, cplx s_n, const Pairing& p, cplx det_ratio);

}  // namespace hz
