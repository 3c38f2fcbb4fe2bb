#include "hz/transfer_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "hz/parallel.hpp"
#include "hz/quadrature.hpp"
#include "json.hpp"

namespace hz {

NodeFamily parse_node_family(const std::string& name) {
  if (name == "chebyshev") return NodeFamily::chebyshev;
  if (name == "legendre") return NodeFamily::legendre;
  throw DomainError("unknown node family '" + name + "'");
}

std::string to_string(NodeFamily f) { return f == NodeFamily::chebyshev ? "chebyshev" : "legendre"; }

CollocationGrid::CollocationGrid(const MarkovPartition& p, Discretization d) : family_(d.family) {
  if (d.nodes < 8) throw DomainError("collocation needs at least 8 nodes per interval");
  ref_ = d.family == NodeFamily::chebyshev ? quad::chebyshev(d.nodes).nodes : quad::gauss_legendre(d.nodes).nodes;
  bary_.assign(ref_.size(), 1.0);
  for (std::size_t j = 0; j < ref_.size(); ++j)
    for (std::size_t k = 0; k < ref_.size(); ++k)
      if (k != j) bary_[j] /= ref_[j] - ref_[k];
  for (const auto& iv : p.intervals()) {
    centers_.push_back(iv.arc.center());
    halfwidths_.push_back(0.5 * iv.arc.width);
    lows_.push_back(iv.arc.lo);
  }
}

double CollocationGrid::to_reference(int interval, double theta) const {
  const BoundaryArc arc{lows_[interval], 2.0 * halfwidths_[interval]};
  return (arc.offset(theta) - halfwidths_[interval]) / halfwidths_[interval];
}

std::vector<double> CollocationGrid::lagrange(double t) const {
  std::vector<double> out(ref_.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < ref_.size(); ++k) {
    const double diff = t - ref_[k];
    if (diff == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      out[k] = 1.0;
      return out;
    }
    out[k] = bary_[k] / diff;
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

cplx CollocationGrid::interpolate(const Eigen::VectorXcd& values, int interval, double theta) const {
  const auto basis = lagrange(to_reference(interval, theta));
  cplx sum = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) sum += basis[k] * values[static_cast<Eigen::Index>(index(interval, k))];
  return sum;
}

TransferOperator::TransferOperator(const MarkovPartition& p, Discretization d, const Observable& a)
    : partition_(p), disc_(d), grid_(p, d), observable_id_(a.id()), stable_(a.stable_constant()) {
  const int n = static_cast<int>(p.size());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < grid_.nodes(); ++k) {
      const cplx y = std::polar(1.0, grid_.angle(j, k));
      for (int i = 0; i < n; ++i) {
        if (!p.transition(i, j)) continue;
        const MoebiusMap& g = p.branch(i);
        const double image = std::arg(g(y));
        Branch b;
        b.row = grid_.index(j, k);
        b.col = grid_.index(i, 0);
        b.log_derivative = log_boundary_derivative(g, grid_.angle(j, k));
        b.weight = stable_ ? stable_weight(a, p, i, image) : 0.0;
        b.basis = grid_.lagrange(grid_.to_reference(i, image));
        branches_.push_back(std::move(b));
      }
    }
}

Eigen::MatrixXcd TransferOperator::build(cplx s, cplx z, Factor factor) const {
  if (z != 0.0 && !stable_)
    throw UnsupportedModeError("observable '" + observable_id_ +
                               "' is not stable-constant; z-coupling is unavailable, use the pairing route");
  const auto dim = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // branches are stored row-major, so each task owns whole rows
  const std::size_t per_row = branches_.size() / dimension();
  parallel_for(dimension(), [&](std::size_t r) {
    for (std::size_t q = r * per_row; q < (r + 1) * per_row; ++q) {
      const Branch& b = branches_[q];
      cplx f = std::exp(s * b.log_derivative + z * b.weight);
      if (factor == Factor::observable) f *= b.weight;
      if (factor == Factor::log_derivative) f *= b.log_derivative;
      for (std::size_t l = 0; l < b.basis.size(); ++l)
        m(static_cast<Eigen::Index>(b.row), static_cast<Eigen::Index>(b.col + l)) += f * b.basis[l];
    }
  });
  return m;
}

TransferMatrix TransferOperator::assemble(cplx s, cplx z) const {
  return {s, z, disc_.nodes, observable_id_, build(s, z, Factor::none)};
}

cplx TransferOperator::determinant(cplx s, cplx z) const {
  const Eigen::MatrixXcd m = build(s, z, Factor::none);
  return (Eigen::MatrixXcd::Identity(m.rows(), m.cols()) - m).partialPivLu().determinant();
}

cplx TransferOperator::dlog_determinant_dz(cplx s) const {
  const Eigen::MatrixXcd m = build(s, 0.0, Factor::none);
  const Eigen::MatrixXcd dm = build(s, 0.0, Factor::observable);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return -(id - m).partialPivLu().solve(dm).trace();
}

cplx TransferOperator::dlog_determinant_ds(cplx s) const {
  const Eigen::MatrixXcd m = build(s, 0.0, Factor::none);
  const Eigen::MatrixXcd dm = build(s, 0.0, Factor::log_derivative);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return -(id - m).partialPivLu().solve(dm).trace();
}

cplx TransferOperator::trace_power(cplx s, int n) const {
  if (n < 1) throw DomainError("trace power needs n >= 1");
  const Eigen::MatrixXcd m = build(s, 0.0, Factor::none);
  Eigen::MatrixXcd acc = m;
  for (int k = 1; k < n; ++k) acc = acc * m;
  return acc.trace();
}

namespace {

struct BoundaryZero {};

class Contour {
 public:
  explicit Contour(const TransferOperator& op) : op_(op) {}

  cplx f(cplx s) const { return op_.determinant(s); }

  double edge(cplx a, cplx fa, cplx b, cplx fb, int depth) const {
    const double da = std::arg(fb / fa);
    const double dm = std::abs(std::log(std::abs(fb) / std::abs(fa)));
    if (std::abs(da) < std::numbers::pi / 4 && dm < 0.7) return da;
    if (depth > 45) throw BoundaryZero{};
    const cplx m = 0.5 * (a + b);
    const cplx fm = f(m);
    if (fm == 0.0) throw BoundaryZero{};
    return edge(a, fa, m, fm, depth + 1) + edge(m, fm, b, fb, depth + 1);
  }

  int winding(const SearchWindow& w) const {
    const std::array<cplx, 4> corners{cplx(w.re_min, w.im_min), cplx(w.re_max, w.im_min), cplx(w.re_max, w.im_max),
                                      cplx(w.re_min, w.im_max)};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
      const cplx a = corners[e], b = corners[(e + 1) % 4];
      const int pieces = std::max(4, static_cast<int>(std::ceil(std::abs(b - a) / 0.05)));
      cplx prev = a, fprev = f(a);
      for (int k = 1; k <= pieces; ++k) {
        const cplx x = a + (b - a) * (static_cast<double>(k) / pieces);
        const cplx fx = f(x);
        if (fx == 0.0) throw BoundaryZero{};
        total += edge(prev, fprev, x, fx, 0);
        prev = x;
        fprev = fx;
      }
    }
    const double turns = total / kTwoPi;
    const int n = static_cast<int>(std::lround(turns));
    if (std::abs(turns - n) > 0.05) throw BoundaryZero{};
    return n;
  }

 private:
  const TransferOperator& op_;
};

cplx ds_richardson(const std::function<cplx(cplx)>& f, cplx x, double h0) {
  constexpr int levels = 4;
  std::array<cplx, levels> t{};
  for (int k = 0; k < levels; ++k) {
    const double h = h0 / std::pow(2.0, k);
    t[k] = (f(x + h) - f(x - h)) / (2.0 * h);
  }
  for (int j = 1; j < levels; ++j)
    for (int k = 0; k + j < levels; ++k) {
      const double c = std::pow(4.0, j);
      t[k] = (c * t[k + 1] - t[k]) / (c - 1.0);
    }
  return t[0];
}

bool inside(const SearchWindow& w, cplx s, double slack) {
  return s.real() >= w.re_min - slack && s.real() <= w.re_max + slack && s.imag() >= w.im_min - slack &&
         s.imag() <= w.im_max + slack;
}

// Mean of the zeros inside |s - c| = rho from contour moments of d'/d, if exactly `count` zeros lie
// inside and they coincide to ~1e-7.
std::optional<cplx> cluster_center(const TransferOperator& op, cplx c, double rho, int count) {
  constexpr int k_points = 128;
  std::array<cplx, 3> m{}, half{};
  for (int k = 0; k < k_points; ++k) {
    const cplx e = std::polar(1.0, kTwoPi * k / k_points);
    const cplx s = c + rho * e;
    const cplx w = op.dlog_determinant_ds(s) * rho * e / static_cast<double>(k_points);
    const cplx terms[3] = {w, w * s, w * s * s};
    for (int j = 0; j < 3; ++j) {
      m[j] += terms[j];
      if (k % 2 == 0) half[j] += 2.0 * terms[j];
    }
  }
  if (std::abs(m[0] - static_cast<double>(count)) > 1e-8) return std::nullopt;
  const cplx mean = m[1] / m[0];
  if (std::abs(half[1] / half[0] - mean) > 1e-10 * std::max(1.0, std::abs(mean))) return std::nullopt;
  if (std::abs(m[2] / m[0] - mean * mean) > 1e-13) return std::nullopt;
  return mean;
}

void search_box(const TransferOperator& op, const Contour& c, const SearchWindow& w, int count, double tol,
                std::vector<cplx>& roots, std::vector<int>& mult) {
  if (count == 0) return;
  const double size = std::max(w.re_max - w.re_min, w.im_max - w.im_min);
  if (count == 1) {
    try {
      const cplx s = refine_zero(op, cplx(0.5 * (w.re_min + w.re_max), 0.5 * (w.im_min + w.im_max)), tol);
      if (inside(w, s, 1e-10)) {
        roots.push_back(s);
        mult.push_back(1);
        return;
      }
    } catch (const ConvergenceError&) {
    }
  }
  if (count > 1) {
    const cplx c(0.5 * (w.re_min + w.re_max), 0.5 * (w.im_min + w.im_max));
    if (const auto z = cluster_center(op, c, 0.5 * std::hypot(w.re_max - w.re_min, w.im_max - w.im_min), count)) {
      roots.push_back(*z);
      mult.push_back(count);
      return;
    }
  }
  if (size < 1e-9) {
    roots.emplace_back(0.5 * (w.re_min + w.re_max), 0.5 * (w.im_min + w.im_max));
    mult.push_back(count);
    return;
  }
  static constexpr std::array<double, 4> offsets{0.5173, 0.4689, 0.5411, 0.4427};
  for (double o : offsets) {
    const double xm = w.re_min + o * (w.re_max - w.re_min);
    const double ym = w.im_min + (1.0 - o) * (w.im_max - w.im_min);
    const std::array<SearchWindow, 4> kids{SearchWindow{w.re_min, xm, w.im_min, ym}, SearchWindow{xm, w.re_max, w.im_min, ym},
                                           SearchWindow{w.re_min, xm, ym, w.im_max}, SearchWindow{xm, w.re_max, ym, w.im_max}};
    std::array<int, 4> counts{};
    try {
      for (int k = 0; k < 4; ++k) counts[k] = c.winding(kids[k]);
    } catch (const BoundaryZero&) {
      continue;
    }
    if (counts[0] + counts[1] + counts[2] + counts[3] != count) continue;
    for (int k = 0; k < 4; ++k) search_box(op, c, kids[k], counts[k], tol, roots, mult);
    return;
  }
  throw ConvergenceError("argument-principle subdivision failed near " + std::to_string(w.re_min) + " + " +
                         std::to_string(w.im_min) + "i");
}

}  // namespace

int winding_number(const TransferOperator& op, const SearchWindow& w) {
  try {
    return Contour(op).winding(w);
  } catch (const BoundaryZero&) {
    throw ConvergenceError("a zero of the determinant lies on or near the window boundary");
  }
}

cplx refine_zero(const TransferOperator& op, cplx s0, double tol, int max_iter) {
  cplx s = s0;
  for (int it = 0; it < max_iter; ++it) {
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    const cplx d = op.determinant(s);
    const cplx dd = (op.determinant(s + h) - op.determinant(s - h)) / (2.0 * h);
    if (dd == 0.0 || !std::isfinite(std::abs(d / dd))) break;
    const cplx step = d / dd;
    s -= step;
    if (std::abs(step) < tol * std::max(1.0, std::abs(s))) return s;
    if (std::abs(s - s0) > 10.0) break;
  }
  throw ConvergenceError("Newton refinement did not converge from s = " + std::to_string(s0.real()) + " + " +
                         std::to_string(s0.imag()) + "i");
}

ResonanceSearch find_resonances(const MarkovPartition& p, const SearchWindow& w, Discretization d,
                                const ResonanceOptions& opt) {
  if (w.re_min < 0.05) throw DomainError("resonance windows must satisfy Re s >= 0.05");
  if (!(w.re_max > w.re_min && w.im_max > w.im_min)) throw DomainError("empty search window");
  const TransferOperator op(p, d);
  const TransferOperator fine(p, {2 * d.nodes, d.family});
  ResonanceSearch out;
  out.winding = winding_number(op, w);
  const int fine_count = winding_number(fine, w);
  if (fine_count != out.winding)
    throw ConvergenceError("unstable window: " + std::to_string(out.winding) + " zeros at N = " +
                           std::to_string(d.nodes) + " but " + std::to_string(fine_count) + " at 2N; increase N");
  std::vector<cplx> roots;
  std::vector<int> mult;
  search_box(op, Contour(op), w, out.winding, opt.newton_tol, roots, mult);

  const Observable one = Observable::constant();
  for (std::size_t k = 0; k < roots.size(); ++k) {
    Resonance r;
    r.s = roots[k];
    r.multiplicity = mult[k];
    r.nodes = d.nodes;
    r.residual = std::abs(op.determinant(r.s));
    r.drift = std::numeric_limits<double>::infinity();
    try {
      if (r.multiplicity == 1) {
        r.drift = std::abs(refine_zero(fine, r.s, opt.newton_tol) - r.s);
      } else if (const auto z = cluster_center(fine, r.s, 1e-3, r.multiplicity)) {
        r.drift = std::abs(*z - r.s);
      }
    } catch (const ConvergenceError&) {
    }
    r.ds_d = ds_richardson([&](cplx x) { return op.determinant(x); }, r.s, 1e-2);
    r.dz_d = ds_richardson([&](cplx x) { return op.determinant(r.s, x); }, 0.0, 1e-2);
    (r.drift > opt.drift_limit ? out.discarded : out.resonances).push_back(r);
  }
  const auto order = [](const Resonance& a, const Resonance& b) {
    if (std::abs(a.s.imag() - b.s.imag()) > 1e-9) return a.s.imag() < b.s.imag();
    return a.s.real() < b.s.real();
  };
  std::sort(out.resonances.begin(), out.resonances.end(), order);
  std::sort(out.discarded.begin(), out.discarded.end(), order);
  return out;
}

EigenfunctionalPair eigenfunctional_pair(const TransferOperator& op, cplx s) {
  const Eigen::MatrixXcd m = op.assemble(s).matrix;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right(m);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left(m.transpose());
  Eigen::Index kr = 0, kl = 0;
  (right.eigenvalues().array() - 1.0).abs().minCoeff(&kr);
  (left.eigenvalues().array() - 1.0).abs().minCoeff(&kl);
  const cplx lambda = right.eigenvalues()[kr];
  if (std::abs(lambda - 1.0) > 1e-4)
    throw DomainError("not a resonance: nearest eigenvalue is " + std::to_string(std::abs(lambda - 1.0)) +
                      " away from 1");
  EigenfunctionalPair out;
  out.s = s;
  out.eigenvalue = lambda;
  out.right = right.eigenvectors().col(kr);
  Eigen::Index big = 0;
  out.right.cwiseAbs().maxCoeff(&big);
  out.right /= out.right[big];
  out.left = left.eigenvectors().col(kl);
  out.left /= out.left.transpose() * out.right;
  const Eigen::VectorXcd res = out.right - m * out.right;
  out.residual = res.norm() / out.right.norm();
  return out;
}

DeterminantResidue residue_via_determinant(const TransferOperator& op, cplx s_n) {
  constexpr double h = 1e-2;
  const auto d = [&](cplx x) { return op.determinant(x); };
  DeterminantResidue out;
  out.ds = ds_richardson(d, s_n, h);
  const double scale = std::max(std::abs(d(s_n + h)), std::abs(d(s_n - h)));
  if (std::abs(out.ds) * h < 1e-3 * scale)
    throw UnsupportedModeError("resonance at s = " + std::to_string(s_n.real()) +
                               " looks multiple; only simple zeros are supported");
  if (s_n.imag() == 0.0) {
    constexpr double step = 1e-20;
    out.dz = op.determinant(s_n, cplx(0.0, step)).imag() / step;
  } else {
    out.dz = ds_richardson([&](cplx z) { return op.determinant(s_n, z); }, 0.0, h);
  }
  out.value = out.dz / out.ds;
  return out;
}

std::string resonances_json(const ResonanceSearch& r) {
  const auto record = [](const Resonance& x) {
    return nlohmann::json{{"re_s", x.s.real()},    {"im_s", x.s.imag()},         {"r_re", x.r().real()},
                          {"r_im", x.r().imag()},  {"multiplicity", x.multiplicity}, {"N", x.nodes},
                          {"residual", x.residual}, {"drift", x.drift}};
  };
  nlohmann::json j;
  j["resonances"] = nlohmann::json::array();
  j["discarded"] = nlohmann::json::array();
  for (const auto& x : r.resonances) j["resonances"].push_back(record(x));
  for (const auto& x : r.discarded) j["discarded"].push_back(record(x));
  j["winding"] = r.winding;
  return j.dump(2);
}

}  // namespace hz
