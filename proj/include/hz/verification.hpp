#pragma once

#include <set>
#include <string>
#include <vector>

#include "hz/boundary_coding.hpp"
#include "hz/transfer_operator.hpp"

namespace hz {

/// Thresholds of the identity suite; every entry must be positive.
struct Tolerances {
  double geometry = 1e-10;
  double special = 1e-8;
  double gamma_asymptotic = 1e-2;
  double trace = 1e-8;
  double determinant = 1e-6;
  double resonance = 1e-8;
  double residue = 1e-5;
  double ps_structure = 1e-6;
  double stationary_slope = 0.15;
  double spectrum = 1e-9;
  double recoupling = 1e-10;

  Tolerances scaled(double factor) const;
};

struct SuiteInput {
  MarkovPartition partition;
  Discretization discretization;
  double L_max = 18.0;
  SearchWindow window;
  std::vector<std::string> observables;  // builtin ids; stable nonconstant ones feed the residue checks
  Tolerances tolerances;
  std::set<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  double value = 0.0;  // measured error (or the fitted quantity for range checks)
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct CriterionTiming {
  int criterion = 0;
  double seconds = 0.0;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  std::vector<CriterionTiming> timings;
  bool passed() const;
};

/// Largest real zero of d(., 0): bisection on the spectral radius of L_s, then Newton.
double ground_resonance(const TransferOperator& op);

/// The same partition with letters and intervals listed in reverse order.
MarkovPartition relabeled(const MarkovPartition& p);

SuiteReport run_suite(const SuiteInput& in);

/// Fixed-width pass/fail table, one row per check.
std::string format_table(const SuiteReport& r);

}  // namespace hz
