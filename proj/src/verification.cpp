#include "hz/verification.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>

#include "hz/patterson_sullivan.hpp"
#include "hz/quantization.hpp"
#include "hz/special_functions.hpp"
#include "hz/zeta_functions.hpp"

namespace hz {

Tolerances Tolerances::scaled(double f) const {
  Tolerances t = *this;
  for (double* v : {&t.geometry, &t.special, &t.gamma_asymptotic, &t.trace, &t.determinant, &t.resonance, &t.residue,
                    &t.ps_structure, &t.stationary_slope, &t.spectrum, &t.recoupling})
    *v *= f;
  return t;
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double ground_resonance(const TransferOperator& op) {
  const auto radius = [&](double s) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.assemble(s).matrix, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  };
  double lo = 0.05, hi = 2.0;
  if (radius(lo) < 1.0) throw DomainError("spectral radius below 1 at s = 0.05: no ground resonance found");
  while (radius(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) throw DomainError("spectral radius stays above 1");
  }
  for (int k = 0; k < 40; ++k) {
    const double mid = 0.5 * (lo + hi);
    (radius(mid) > 1.0 ? lo : hi) = mid;
  }
  return refine_zero(op, 0.5 * (lo + hi)).real();
}

MarkovPartition relabeled(const MarkovPartition& p) {
  const GroupPresentation& g = p.group();
  const int n = static_cast<int>(g.size());
  const auto flip = [n](int i) { return n - 1 - i; };
  std::vector<std::string> labels(n);
  std::vector<MoebiusMap> matrices(n);
  std::vector<int> inverse(n);
  std::vector<SchottkyDisc> discs;
  for (int i = 0; i < n; ++i) {
    labels[flip(i)] = g.label(i);
    matrices[flip(i)] = g.matrix(i);
    inverse[flip(i)] = flip(g.inverse(i));
  }
  if (!g.discs().empty()) discs.assign(g.discs().rbegin(), g.discs().rend());
  GroupPresentation h(labels, matrices, inverse, g.kind(), discs);

  const int m = static_cast<int>(p.size());
  std::vector<CodingInterval> intervals(m);
  std::vector<std::vector<int>> transition(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i) {
    CodingInterval c = p.interval(i);
    c.generator = flip(c.generator);
    c.branch_letter = flip(c.branch_letter);
    intervals[m - 1 - i] = c;
    for (int j = 0; j < m; ++j) transition[m - 1 - i][m - 1 - j] = p.transition(i, j);
  }
  return MarkovPartition(std::move(h), std::move(intervals), std::move(transition));
}

namespace {

using Clock = std::chrono::steady_clock;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Integral over [0, inf) by tanh-sinh on the half line, real and imaginary parts separately.
template <class F>
cplx half_line(F f) {
  boost::math::quadrature::exp_sinh<double> q;
  const double re = q.integrate([&](double u) { return f(u).real(); }, 1e-14);
  const double im = q.integrate([&](double u) { return f(u).imag(); }, 1e-14);
  return {re, im};
}

template <class F>
cplx whole_line(F f) {
  return half_line(f) + half_line([&](double u) { return f(-u); });
}

// Nine-point central first and second derivatives.
template <class F>
std::pair<cplx, cplx> derivatives(F f, double u, double h) {
  static constexpr double c1[] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  static constexpr double c2[] = {8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
  cplx d1 = 0.0, d2 = -205.0 / 72 * f(u);
  for (int k = 1; k <= 4; ++k) {
    const cplx p = f(u + k * h), m = f(u - k * h);
    d1 += c1[k - 1] * (p - m);
    d2 += c2[k - 1] * (p + m);
  }
  return {d1 / h, d2 / (h * h)};
}

class Suite {
 public:
  explicit Suite(const SuiteInput& in) : in_(in), tol_(in.tolerances) {}

  SuiteReport run() {
    const std::map<int, void (Suite::*)()> table{
        {1, &Suite::geometry},  {2, &Suite::special},   {3, &Suite::trace},       {4, &Suite::determinant},
        {5, &Suite::stability}, {6, &Suite::residues},  {7, &Suite::ps_structure}, {8, &Suite::stationary_phase},
        {9, &Suite::spectrum},  {10, &Suite::recoupling}};
    for (const auto& [id, fn] : table) {
      if (!in_.criteria.count(id)) continue;
      criterion_ = id;
      const auto t0 = Clock::now();
      try {
        (this->*fn)();
      } catch (const std::exception& e) {
        add("exception", 0.0, 0.0, false, e.what());
      }
      report_.timings.push_back({id, std::chrono::duration<double>(Clock::now() - t0).count()});
    }
    return std::move(report_);
  }

 private:
  void add(std::string name, double value, double tol, bool passed, std::string note = {}) {
    report_.checks.push_back({criterion_, std::move(name), value, tol, passed, std::move(note)});
  }
  void below(std::string name, double value, double tol, std::string note = {}) {
    add(std::move(name), value, tol, value < tol, std::move(note));
  }

  const TransferOperator& op() {
    if (!op_) op_.emplace(in_.partition, in_.discretization);
    return *op_;
  }
  double delta() {
    if (!delta_) delta_ = ground_resonance(op());
    return *delta_;
  }
  const ResonanceSearch& search() {
    if (!search_) search_ = find_resonances(in_.partition, in_.window, in_.discretization);
    return *search_;
  }
  const BoundaryFunctional& ground() {
    if (!ground_) ground_.emplace(boundary_values(op(), delta()));
    return *ground_;
  }
  std::vector<std::string> stable_observables() const {
    std::vector<std::string> ids;
    for (const auto& id : in_.observables)
      if (id != "one" && builtin_observable(id).stable_constant()) ids.push_back(id);
    return ids;
  }

  void geometry() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto angle = [&] { return kTwoPi * unit(rng); };
    const auto disc = [&] { return DiscPoint(std::polar(0.9 * std::sqrt(unit(rng)), angle())); };
    const auto isometry = [&] {
      return rotation(angle()) * geodesic_flow(4.0 * unit(rng) - 2.0) * rotation(angle());
    };
    constexpr int kSamples = 10000;
    double cocycle = 0, id2 = 0, moreids = 0, bid = 0, coshs = 0, coshprop = 0;
    for (int k = 0; k < kSamples; ++k) {
      const MoebiusMap g = isometry();
      const DiscPoint z = disc();
      const BoundaryPoint b(angle()), bp(angle());
      const BoundaryPoint gb = BoundaryPoint::from_complex(g(b.point()));
      const BoundaryPoint gbp = BoundaryPoint::from_complex(g(bp.point()));
      const DiscPoint g0(g(0.0));
      cocycle = std::max(cocycle, std::abs(busemann(DiscPoint(g(z.z())), gb) - busemann(z, b) - busemann(g0, gb)));
      const double dg = boundary_derivative(g, b), dgp = boundary_derivative(g, bp);
      id2 = std::max(id2, std::abs(poisson_kernel(DiscPoint(g(z.z())), gb) * dg / poisson_kernel(z, b) - 1.0));
      const double chord = std::abs(b.point() - bp.point());
      moreids = std::max(moreids, std::abs(std::abs(gb.point() - gbp.point()) - std::sqrt(dg * dgp) * chord));
      bid = std::max(bid, std::abs(std::norm(gb.point() - gbp.point()) -
                                   std::exp(-(busemann(g0, gb) + busemann(g0, gbp))) * chord * chord));
      const double ch = cosh_dist_to_geodesic(z, b, bp);
      coshprop = std::max(coshprop,
                          std::abs(std::exp(busemann(z, b) + busemann(z, bp)) * ch * ch * chord * chord / 4.0 - 1.0));
      const cplx on = frame_to_group({bp, b, 6.0 * unit(rng) - 3.0})(0.0);
      coshs = std::max(coshs, std::abs(cosh_dist_to_geodesic(DiscPoint(on), bp, b) - 1.0));
    }
    below("cocycle <gz,gb> - <z,b> - <g0,gb>", cocycle, tol_.geometry);
    below("harmonic measure P(gz,gb)|g'(b)|/P(z,b) - 1", id2, tol_.geometry);
    below("chord rule |gb-gb'| = |g'(b)g'(b')|^(1/2)|b-b'|", moreids, tol_.geometry);
    below("chord rule through horocycle brackets", bid, tol_.geometry);
    below("cosh distance equals 1 on the geodesic", coshs, tol_.geometry);
    below("Poisson product with cosh^2 distance", coshprop, tol_.geometry);
    const auto rep = coordinates_check(2.3, 0.4, kSamples);
    below("horocyclic distance cosh s = sqrt(1+u^2)", rep.cosh_error, tol_.geometry);
    below("area form dt du", rep.jacobian_error, tol_.geometry);
    below("half-plane coordinates e^t(u+i)", rep.half_plane_error, tol_.geometry);
  }

  void special() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double e0 = 0, ec = 0, ed = 0;
    for (int k = 0; k < 10; ++k) {
      const cplx s(0.6 + 2.4 * unit(rng), 6.0 * unit(rng) - 3.0);
      e0 = std::max(e0, rel(mu0(s), 2.0 * half_line([&](double u) { return std::exp(-s * std::log1p(u * u)); })));
      const double r = 4.0 * unit(rng);
      const cplx sc(0.8 + 1.7 * unit(rng), 4.0 * unit(rng) - 2.0);
      ec = std::max(ec, rel(mu_c(r, sc), 2.0 * half_line([&](double u) {
                              return std::exp(-sc * std::log1p(u * u)) * hyp_even(r, u);
                            })));
      const int m = 2 * (1 + k % 5);
      cplx sd;
      do sd = cplx(-3.5 + 2.9 * unit(rng), 3.0 * unit(rng) - 1.5);
      while (2.0 * sd.real() - 0.5 * m >= -1.2);
      ed = std::max(ed, rel(mu_d(m, sd), whole_line([&](double u) {
                              return std::pow(cplx(u, 1.0), -0.5 * m) * std::exp(sd * std::log1p(u * u));
                            })));
    }
    below("mu0 closed form vs quadrature (10 points)", e0, tol_.special);
    below("mu_c closed form vs quadrature (10 points)", ec, tol_.special);
    below("mu_d closed form vs quadrature (10 points)", ed, tol_.special);

    double asym = 0.0;
    for (double x : {0.0, 0.5, 1.0})
      for (double y : {50.0, -50.0}) {
        const double model =
            std::sqrt(kTwoPi) * std::exp(-0.25 * kTwoPi * std::abs(y)) * std::pow(std::abs(y), x - 0.5);
        asym = std::max(asym, std::abs(std::abs(gamma_complex(cplx(x, y))) / model - 1.0));
      }
    below("Gamma vertical asymptotics at |y| = 50", asym, tol_.gamma_asymptotic);

    double ode = 0.0;
    for (cplx tau : {cplx(0.0), cplx(0.3), cplx(1.0), cplx(3.0), cplx(1.2, -0.2)})
      for (int k = 0; k <= 200; ++k) {
        const double u = -10.0 + 0.1 * k;
        for (bool even : {true, false}) {
          const auto f = [&](double x) { return even ? hyp_even(tau, x) : hyp_odd(tau, x); };
          const auto [d1, d2] = derivatives(f, u, 0.02);
          ode = std::max(ode, std::abs((u * u + 1.0) * d2 + 2.0 * u * d1 + (0.25 + tau * tau) * f(u)));
        }
      }
    below("hypergeometric ODE residual on [-10, 10]", ode, tol_.special);
    double first = 0.0;
    for (int m : {2, 4, 6, 10})
      for (int k = 0; k <= 200; ++k) {
        const double u = -10.0 + 0.1 * k;
        const auto f = [&](double x) { return discrete_solution(m, x); };
        const cplx d1 = derivatives(f, u, 0.005).first;
        first = std::max(first, std::abs(cplx(u, 1.0) * d1 + 0.5 * m * f(u)));
      }
    below("discrete series first-order ODE residual", first, tol_.special);
  }

  cplx orbit_sum(cplx s, int n) {
    cplx sum = 0.0;
    for (const auto& o : periodic_orbits(in_.partition, n)) {
      const double l = o.log_derivative_sum;
      sum += std::exp(-s * l) / (1.0 - std::exp(-l));
    }
    return sum;
  }

  void trace() {
    double worst = 0.0;
    for (cplx s : {cplx(1.0), cplx(0.6, 2.0), cplx(delta())})
      for (int n = 1; n <= 4; ++n) worst = std::max(worst, rel(op().trace_power(s, n), orbit_sum(s, n)));
    char note[64];
    std::snprintf(note, sizeof note, "N = %d, s in {1, 0.6+2i, delta}", in_.discretization.nodes);
    below("Tr L^n vs periodic-orbit sums, n = 1..4", worst, tol_.trace, note);
  }

  void determinant() {
    const OrbitSpectrum spec(in_.partition, in_.L_max);
    for (double s : {1.5, 2.0}) {
      const cplx logd = std::log(op().determinant(s));
      char label[96];
      for (const auto& [name, v] :
           {std::pair{"orbit-sum exponential",
                      log_orbit_sum_exponential(s, in_.partition, 0, 0.1 * tol_.determinant * std::abs(logd))},
            std::pair{"Euler product", log_euler_product(s, spec)}}) {
        const double err = std::abs(logd - v.log_value);
        std::snprintf(label, sizeof label, "log det vs %s at s = %.1f", name, s);
        char note[64];
        std::snprintf(note, sizeof note, "tail bound %.2e", v.tail_bound);
        add(label, err / std::abs(logd), tol_.determinant,
            err / std::abs(logd) < tol_.determinant && err <= v.tail_bound + 1e-12, note);
      }
    }
  }

  void stability() {
    const Discretization d = in_.discretization;
    std::vector<double> values;
    for (int n : {d.nodes, 2 * d.nodes})
      for (NodeFamily f : {NodeFamily::chebyshev, NodeFamily::legendre})
        values.push_back(n == d.nodes && f == d.family ? delta()
                                                        : ground_resonance(TransferOperator(in_.partition, {n, f})));
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    char note[64];
    std::snprintf(note, sizeof note, "delta = %.15f", delta());
    below("ground resonance under N -> 2N and node swap", *hi - *lo, tol_.resonance, note);

    const auto& a = search().resonances;
    const auto b = find_resonances(relabeled(in_.partition), in_.window, d).resonances;
    bool same = a.size() == b.size();
    double gap = 0.0;
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].multiplicity == b[i].multiplicity;
      gap = std::max(gap, std::abs(a[i].s - b[i].s));
    }
    std::snprintf(note, sizeof note, "%zu zeros in the window", a.size());
    add("resonance set under generator relabeling", gap, tol_.resonance, same && gap < tol_.resonance, note);
  }

  void residues() {
    const auto ids = stable_observables();
    add("stable nonconstant observables selected", static_cast<double>(ids.size()), 2.0, ids.size() >= 2,
        "at least 2 required");
    std::vector<double> points{delta()};
    for (const auto& r : search().resonances)
      if (r.multiplicity == 1 && std::abs(r.s.imag()) < 1e-10 && std::abs(r.s.real() - delta()) > 1e-6)
        points.push_back(r.s.real());
    for (double s : points) {
      const TransferOperator one(in_.partition, in_.discretization);
      const BoundaryFunctional t = s == delta() ? ground() : boundary_values(one, s);
      const cplx r1 = residue_via_determinant(one, s).value;
      for (const auto& id : ids) {
        const Observable a = builtin_observable(id);
        const cplx det = residue_via_determinant(TransferOperator(in_.partition, in_.discretization, a), s).value / r1;
        const cplx ps = ps_pair(a, t).ratio();
        char label[128], note[96];
        std::snprintf(label, sizeof label, "residue ratio %s at s = %.10f", id.c_str(), s);
        std::snprintf(note, sizeof note, "ps %.12g, det %.12g", ps.real(), det.real());
        below(label, rel(ps, det), tol_.residue, note);
      }
    }
  }

  void ps_structure() {
    const auto& t = ground();
    const std::vector<std::function<cplx(double)>> tests{
        [](double) { return cplx(1.0); }, [](double x) { return cplx(1.5 + std::cos(x)); },
        [](double x) { return cplx(2.0 + std::sin(3.0 * x)); }, [](double x) { return std::exp(cplx(0.0, 2.0 * x)); }};
    for (int i = 0; i < static_cast<int>(in_.partition.size()); ++i) {
      double worst = 0.0;
      for (const auto& f : tests) worst = std::max(worst, conformal_residual(t, i, f));
      below("conformal rule on interval " + in_.partition.interval(i).label, worst, tol_.ps_structure);
    }
    below("eigenfunction reconstruction from T (z2 independence)", t.certificate, tol_.ps_structure);

    const auto ids = stable_observables();
    const Observable a = builtin_observable(ids.empty() ? std::string("sigma_plus_sin2theta") : ids.front());
    const cplx base = ps_pair(a, t, 2).ratio();
    const MarkovPartition fine = refine(in_.partition);
    const TransferOperator opf(fine, in_.discretization);
    below("pairing under rectangle refinement (" + a.id() + ")",
          rel(ps_pair(a, boundary_values(opf, delta())).ratio(), base), tol_.ps_structure);
    std::map<std::pair<int, int>, double> shift;
    const int m = static_cast<int>(in_.partition.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) shift[{i, j}] = 0.1 + 0.05 * std::sin(1.0 + i + 2.0 * j);
    below("pairing under shifted section windows (" + a.id() + ")", rel(ps_pair_shifted(a, t, shift).ratio(), base),
          tol_.ps_structure);
  }

  void stationary_phase() {
    const MoebiusMap g = frame_to_group({BoundaryPoint(2.0), BoundaryPoint(0.3), 0.4});
    const PhaseSymbol bump = PhaseSymbol::gaussian_bump(g(0.0) * 0.5 + 0.1, 1.0);
    const std::vector<double> rs{20, 40, 80, 160, 320, 640};
    const double slope = fit_error_slope(stationary_phase_sweep(bump, g, rs));
    add("stationary-phase error slope over r = 20..640", slope, tol_.stationary_slope,
        std::abs(slope + 1.0) <= tol_.stationary_slope, "target -1");
    double worst = 0.0;
    for (double r : rs) worst = std::max(worst, rel(L_r_quadrature(PhaseSymbol::constant(), g, r).value, mu0(cplx(0.5, r))));
    below("L_r of a = 1 vs mu0(1/2 + ir)", worst, tol_.special);
  }

  void spectrum() {
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
      for (const auto& o : periodic_orbits(in_.partition, n)) worst = std::max(worst, std::abs(o.log_derivative_sum - o.length));
    below("Birkhoff sums of log|F'| vs trace lengths, period <= 6", worst, tol_.spectrum);
    long long mismatch = 0;
    for (int n = 1; n <= 8; ++n)
      mismatch += std::llabs(static_cast<long long>(periodic_orbits(in_.partition, n).size()) -
                             transition_trace(in_.partition, n));
    add("periodic point counts vs Tr A^n, n <= 8", static_cast<double>(mismatch), 0.0, mismatch == 0, "exact");
  }

  void recoupling() {
    double low = 0.0, sums = 0.0;
    for (cplx s : {cplx(1.3), cplx(0.75, 2.0), cplx(-0.4, 0.1)})
      low = std::max({low, std::abs(recoupling_B(s, 0) - 1.0), std::abs(recoupling_B(s, 1) - (2.0 * s - 1.0) / 4.0)});
    const double y = 10.0;
    for (cplx s : {cplx(1.3), cplx(0.75, 2.0), cplx(2.0, -1.0)}) {
      const cplx direct = std::pow(cplx(2.0 * y * (1.0 - std::sqrt(1.0 - 1.0 / y))), 2.0 * s - 1.0);
      const auto b = recoupling_coefficients(s, 12);
      cplx sum = 0.0;
      for (int n = 12; n >= 0; --n) sum = sum / y + b[n];
      sums = std::max(sums, rel(sum, direct));
    }
    below("B(s,0) = 1 and B(s,1) = (2s-1)/4", low, tol_.recoupling);
    below("12-term partial sums at y = 10", sums, tol_.recoupling);
  }

  const SuiteInput& in_;
  Tolerances tol_;
  int criterion_ = 0;
  SuiteReport report_;
  std::optional<TransferOperator> op_;
  std::optional<double> delta_;
  std::optional<ResonanceSearch> search_;
  std::optional<BoundaryFunctional> ground_;
};

}  // namespace

SuiteReport run_suite(const SuiteInput& in) { return Suite(in).run(); }

std::string format_table(const SuiteReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-3s %-60s %-12s %-10s %s\n", "id", "check", "value", "tolerance", "status");
  out += line;
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "%-3d %-60s %-12.3e %-10.2e %s%s%s\n", c.criterion, c.name.c_str(), c.value,
                  c.tolerance, c.passed ? "PASS" : "FAIL", c.note.empty() ? "" : "  ", c.note.c_str());
    out += line;
  }
  for (const auto& t : r.timings) {
    std::snprintf(line, sizeof line, "criterion %d: %.2f s\n", t.criterion, t.seconds);
    out += line;
  }
  return out;
}

}  // namespace hz
