#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hz/boundary_coding.hpp"
#include "hz/observable.hpp"

namespace hz {

enum class NodeFamily { chebyshev, legendre };

NodeFamily parse_node_family(const std::string& name);
std::string to_string(NodeFamily f);

struct Discretization {
  int nodes = 24;
  NodeFamily family = NodeFamily::chebyshev;
};

/// Collocation points: theta = center(I_i) + halfwidth(I_i) * t_k for reference nodes t_k in (-1, 1).
class CollocationGrid {
 public:
  CollocationGrid(const MarkovPartition& p, Discretization d);

  int nodes() const { return static_cast<int>(ref_.size()); }
  std::size_t size() const { return centers_.size() * ref_.size(); }
  NodeFamily family() const { return family_; }
  std::size_t index(int interval, int k) const { return static_cast<std::size_t>(interval) * ref_.size() + k; }
  int interval_of(std::size_t idx) const { return static_cast<int>(idx / ref_.size()); }
  double angle(int interval, int k) const { return centers_[interval] + halfwidths_[interval] * ref_[k]; }
  double angle(std::size_t idx) const { return angle(interval_of(idx), static_cast<int>(idx % ref_.size())); }
  double reference(int k) const { return ref_[k]; }
  /// Reference coordinate of theta in interval i.
  double to_reference(int interval, double theta) const;
  /// Barycentric Lagrange basis values at reference coordinate t.
  std::vector<double> lagrange(double t) const;
  /// Interpolates grid values on one interval at theta.
  cplx interpolate(const Eigen::VectorXcd& values, int interval, double theta) const;

 private:
  std::vector<double> ref_, bary_, centers_, halfwidths_, lows_;
  NodeFamily family_;
};

struct TransferMatrix {
  cplx s;
  cplx z;
  int nodes = 0;
  std::string observable;
  Eigen::MatrixXcd matrix;
};

/**
 * One-sided transfer operator
 *   (L_{s,z} f)(y) = sum over admissible branches G of |G'(y)|^s e^{z A(G y)} f(G y)
 * with A the sigma-integral of a stable-constant observable over (0, tau).
 *
 * Branch geometry is independent of (s, z) and is computed once.
 */
class TransferOperator {
 public:
  TransferOperator(const MarkovPartition& p, Discretization d, const Observable& a = Observable::constant());

  const MarkovPartition& partition() const { return partition_; }
  const CollocationGrid& grid() const { return grid_; }
  const Discretization& discretization() const { return disc_; }
  const std::string& observable_id() const { return observable_id_; }
  std::size_t dimension() const { return grid_.size(); }

  /// z != 0 needs a stable-constant observable (UnsupportedModeError otherwise).
  TransferMatrix assemble(cplx s, cplx z = 0.0) const;
  /// d(s, z) = det(I - L_{s,z}).
  cplx determinant(cplx s, cplx z = 0.0) const;
  /// d/dz log d(s, z) at z = 0, as -tr((I - L)^{-1} dL/dz).
  cplx dlog_determinant_dz(cplx s) const;
  /// d/ds log d(s, 0).
  cplx dlog_determinant_ds(cplx s) const;
  /// Tr(L_{s,0}^n).
  cplx trace_power(cplx s, int n) const;

 private:
  struct Branch {
    std::size_t row = 0;
    std::size_t col = 0;  // first column of the target interval block
    double log_derivative = 0.0;
    double weight = 0.0;  // A at the branch image
    std::vector<double> basis;
  };
  enum class Factor { none, observable, log_derivative };
  Eigen::MatrixXcd build(cplx s, cplx z, Factor factor) const;

  MarkovPartition partition_;
  Discretization disc_;
  CollocationGrid grid_;
  std::string observable_id_;
  bool stable_ = true;
  std::vector<Branch> branches_;
};

struct SearchWindow {
  double re_min = 0.05, re_max = 1.2;
  double im_min = -1.0, im_max = 1.0;
};

struct Resonance {
  cplx s;
  int multiplicity = 1;
  int nodes = 0;
  double residual = 0.0;  // |d(s, 0)|
  double drift = 0.0;     // |s at N - s at 2N|
  cplx ds_d;              // partial_s d(s, 0)
  cplx dz_d;              // partial_z d(s, 0) for a = 1
  cplx r() const { return (s - 0.5) / cplx(0.0, 1.0); }
};

struct ResonanceSearch {
  std::vector<Resonance> resonances;  // sorted by (Im s, Re s)
  std::vector<Resonance> discarded;   // moved more than the drift limit under N -> 2N
  int winding = 0;
};

struct ResonanceOptions {
  double drift_limit = 1e-4;
  double newton_tol = 1e-14;
};

/// Zeros of d(., 0) in the window: argument principle, box subdivision, Newton, then re-check at 2N.
/// Windows reaching below Re s = 0.05 are refused.
ResonanceSearch find_resonances(const MarkovPartition& p, const SearchWindow& w, Discretization d,
                                const ResonanceOptions& opt = {});

/// Zero count of d(., 0) inside the window by the argument principle.
int winding_number(const TransferOperator& op, const SearchWindow& w);

/// Newton refinement of a zero of d(., 0).
cplx refine_zero(const TransferOperator& op, cplx s0, double tol = 1e-14, int max_iter = 60);

struct EigenfunctionalPair {
  cplx s;
  cplx eigenvalue;
  Eigen::VectorXcd left;   // functional side, left^T L = lambda left^T
  Eigen::VectorXcd right;  // function side on the grid
  double residual = 0.0;   // |(I - L) right| / |right|
};

/// Eigenvalue of L_{s,0} nearest 1 with both eigenvectors; left^T right = 1.
/// DomainError if that eigenvalue is farther than 1e-4 from 1.
EigenfunctionalPair eigenfunctional_pair(const TransferOperator& op, cplx s);

struct DeterminantResidue {
  cplx value;  // partial_z d / partial_s d
  cplx dz;
  cplx ds;
};

/// Residue ratio at a simple zero s_n of d(., 0); UnsupportedModeError for a multiple zero.
DeterminantResidue residue_via_determinant(const TransferOperator& op, cplx s_n);

/// {"re_s", "im_s", "r_re", "r_im", "multiplicity", "N", "residual", "drift"} records.
std::string resonances_json(const ResonanceSearch& r);

}  // namespace hz
