#pragma once

#include <string>
#include <vector>

#include "hz/fuchsian_group.hpp"

namespace hz {

/// One Markov interval. F acts on it by the matrix of `generator`; the inverse
/// branch is the matrix of `branch_letter`.
struct CodingInterval {
  std::string label;
  BoundaryArc arc;
  int generator = 0;
  int branch_letter = 0;
};

/**
 * Expanding boundary map F given by intervals and a 0/1 transition matrix.
 *
 * transition(i, j) = 1 iff F(I_i) covers I_j. Intervals may leave gaps (Schottky
 * case); images must then either cover an interval or miss its interior.
 */
class MarkovPartition {
 public:
  MarkovPartition(GroupPresentation group, std::vector<CodingInterval> intervals,
                  std::vector<std::vector<int>> transition);

  const GroupPresentation& group() const { return group_; }
  std::size_t size() const { return intervals_.size(); }
  const CodingInterval& interval(int i) const { return intervals_.at(i); }
  const std::vector<CodingInterval>& intervals() const { return intervals_; }
  int transition(int i, int j) const { return transition_[i][j]; }
  const std::vector<std::vector<int>>& transition_matrix() const { return transition_; }
  const MoebiusMap& forward(int i) const { return group_.matrix(intervals_[i].generator); }
  const MoebiusMap& branch(int i) const { return group_.matrix(intervals_[i].branch_letter); }

  /// Interval containing theta, or -1 for a gap. Throws CodingError within `guard` of an endpoint.
  int locate(double theta, double guard = 1e-12) const;
  /// log|F'| at theta, assumed to lie in interval i.
  double log_derivative(int i, double theta) const { return log_boundary_derivative(forward(i), theta); }

  /// Sup of |inverse branch'| over admissible targets, for the iterate `contraction_iterate()`.
  double contraction_bound() const { return contraction_; }
  int contraction_iterate() const { return contraction_iterate_; }
  /// Smallest angular gap between distinct intervals.
  double min_separation() const;

 private:
  GroupPresentation group_;
  std::vector<CodingInterval> intervals_;
  std::vector<std::vector<int>> transition_;
  double contraction_ = 1.0;
  int contraction_iterate_ = 1;
};

/// One interval per letter, cut by its disc; the branch on I(g) is g.
MarkovPartition schottky_partition(const GroupPresentation& g);

/// Splits every interval into its two-letter cylinders G_i(I_j).
MarkovPartition refine(const MarkovPartition& p);

/// Tr(transition^n).
long long transition_trace(const MarkovPartition& p, int n);

struct PeriodicOrbit {
  std::vector<int> cycle;  // x in I_{c0}, F x in I_{c1}, ...
  BoundaryPoint point;
  double log_derivative_sum = 0.0;
  Word word;            // letters of the inverse branches along the cycle
  double length = 0.0;  // trace_length of the word
};

/// Every point of period n (rotations are distinct points), in lexicographic cycle order.
std::vector<PeriodicOrbit> periodic_orbits(const MarkovPartition& p, int n);

/// A closed orbit up to rotation, with its primitive orbit points.
struct OrbitClass {
  std::vector<int> cycle;  // least rotation
  Word word;
  std::vector<double> points;  // angles of the primitive orbit
  double primitive_length = 0.0;
  double length = 0.0;
  int multiplicity = 1;
};

/// Classes of admissible cycles with period <= max_period, ordered by (period, cycle).
std::vector<OrbitClass> orbit_classes(const MarkovPartition& p, int max_period);

/// Attracting fixed point of the composed inverse branches along `cycle`.
double cycle_fixed_point(const MarkovPartition& p, const std::vector<int>& cycle);

/// tau(y) = log|F'(y)|; throws CodingError at endpoints or in gaps.
double return_time(const MarkovPartition& p, const BoundaryPoint& y);

/// Coding-table text: {"intervals": [{label, lo, hi, forward}], "transition": [[...]]}.
std::string coding_table_json(const MarkovPartition& p);
/// Parses and validates a coding table against `g`. SchemaError for malformed fields, CodingError for
/// violated Markov conditions.
MarkovPartition load_coding_table(const std::string& text, const GroupPresentation& g);

}  // namespace hz
