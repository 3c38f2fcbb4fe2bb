#include "hz/patterson_sullivan.hpp"

#include <cmath>

#include "hz/parallel.hpp"
#include "hz/quadrature.hpp"
#include "json.hpp"

namespace hz {

namespace {

double chord_log(double x, double y) { return std::log(std::norm(std::polar(1.0, x) - std::polar(1.0, y))); }

int letter(const MarkovPartition& p, int interval) { return p.interval(interval).branch_letter; }

// Smallest angular distance between two arcs.
double arc_gap(const BoundaryArc& a, const BoundaryArc& b) {
  return std::min({a.endpoint_distance(b.lo), a.endpoint_distance(b.hi()), b.endpoint_distance(a.lo),
                   b.endpoint_distance(a.hi())});
}

cplx sum_ordered(const std::vector<cplx>& parts) {
  // pairwise reduction in a fixed order
  std::vector<cplx> v = parts;
  while (v.size() > 1) {
    std::vector<cplx> next((v.size() + 1) / 2);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = v[2 * k] + (2 * k + 1 < v.size() ? v[2 * k + 1] : 0.0);
    v.swap(next);
  }
  return v.empty() ? cplx(0.0) : v[0];
}

std::vector<ForwardNode> forward_nodes(const BoundaryFunctional& t, int depth) {
  const auto& p = t.partition;
  const auto& g = t.grid;
  const int n = static_cast<int>(p.size());
  std::vector<ForwardNode> out;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const int l = g.interval_of(idx);
    // depth-first over admissible prefixes c1..cd with transition(cd, l)
    struct Frame {
      double theta;
      double log_derivative;
      std::vector<int> word;  // reversed: l, cd, ..., c1
    };
    std::vector<Frame> stack{{g.angle(idx), 0.0, {l}}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (static_cast<int>(f.word.size()) == depth + 1) {
        ForwardNode node;
        node.theta = f.theta;
        node.weight = t.weights[static_cast<Eigen::Index>(idx)] * std::exp(t.s * f.log_derivative);
        node.word.assign(f.word.rbegin(), f.word.rend());
        out.push_back(std::move(node));
        continue;
      }
      for (int c = n - 1; c >= 0; --c) {
        if (!p.transition(c, f.word.back())) continue;
        const MoebiusMap& b = p.branch(c);
        Frame next{std::arg(b(std::polar(1.0, f.theta))), f.log_derivative + log_boundary_derivative(b, f.theta), f.word};
        next.word.push_back(c);
        stack.push_back(std::move(next));
      }
    }
  }
  return out;
}

}  // namespace

BoundaryFunctional boundary_values(const TransferOperator& op, cplx s_n) {
  const Eigen::MatrixXcd m = op.assemble(s_n).matrix;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  int near = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) near += std::abs(es.eigenvalues()[k] - 1.0) < 1e-6;
  if (near > 1) throw UnsupportedModeError("eigenvalue 1 is not simple at this s; multiple resonances are unsupported");
  const auto pair = eigenfunctional_pair(op, s_n);

  BoundaryFunctional t{s_n, op.partition(), op.grid(), pair.left / pair.left.sum(), pair.right, 0.0,
                       std::abs(s_n.imag()) > 0.0};
  const auto& p = t.partition;
  const auto& g = t.grid;
  // eigenfunction rebuilt from T: h(y) = T(1_{other letters} |x - y|^{-2s})
  Eigen::VectorXcd rebuilt(static_cast<Eigen::Index>(g.size()));
  for (std::size_t yi = 0; yi < g.size(); ++yi) {
    cplx h = 0.0;
    for (std::size_t xi = 0; xi < g.size(); ++xi)
      if (letter(p, g.interval_of(xi)) != letter(p, g.interval_of(yi)))
        h += t.weights[static_cast<Eigen::Index>(xi)] * std::exp(-s_n * chord_log(g.angle(xi), g.angle(yi)));
    rebuilt[static_cast<Eigen::Index>(yi)] = h;
  }
  const Eigen::VectorXcd ratio = t.eigenfunction.cwiseQuotient(rebuilt);
  const cplx mean = ratio.mean();
  t.certificate = (ratio.array() / mean - 1.0).abs().maxCoeff();
  if (t.certificate > 1e-6)
    throw ConvergenceError("boundary functional failed the product-structure certificate (spread " +
                           std::to_string(t.certificate) + ")");
  return t;
}

cplx integrate(const BoundaryFunctional& t, const std::function<cplx(double)>& f) {
  cplx sum = 0.0;
  for (std::size_t k = 0; k < t.grid.size(); ++k) sum += t.weights[static_cast<Eigen::Index>(k)] * f(t.grid.angle(k));
  return sum;
}

double conformal_residual(const BoundaryFunctional& t, int interval, const std::function<cplx(double)>& f) {
  const auto& p = t.partition;
  const auto& g = t.grid;
  const MoebiusMap& b = p.branch(interval);
  cplx lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const int j = g.interval_of(k);
    const double x = g.angle(k);
    const cplx w = t.weights[static_cast<Eigen::Index>(k)];
    if (p.transition(interval, j)) lhs += w * f(std::arg(b(std::polar(1.0, x)))) * std::exp(t.s * log_boundary_derivative(b, x));
    if (j == interval) rhs += w * f(x);
  }
  return std::abs(lhs - rhs) / std::abs(rhs);
}

std::map<std::vector<int>, cplx> cylinder_masses(const BoundaryFunctional& t, int depth) {
  if (depth < 0) throw DomainError("cylinder depth must be nonnegative");
  std::map<std::vector<int>, cplx> out;
  for (const auto& node : forward_nodes(t, depth)) out[std::vector<int>(node.word.begin(), node.word.end())] += node.weight;
  return out;
}

double radon(const Observable& a, double b_minus, double b_plus, double lo, double hi) {
  if (std::abs(std::polar(1.0, b_minus) - std::polar(1.0, b_plus)) < 1e-12)
    throw DomainError("radon transform needs distinct endpoints");
  if (a.stable_constant()) return a.window_integral(b_plus, lo, hi);
  const double beta = horocycle_offset(b_minus, b_plus);
  return quad::adaptive([&](double sigma) { return a(b_minus, b_plus, sigma - beta); }, lo, hi, 1e-14).value;
}

cplx pair_rectangles(const BoundaryFunctional& t, const PairingIntegrand& integrand, int depth) {
  const auto& p = t.partition;
  const auto& g = t.grid;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (letter(p, static_cast<int>(i)) != letter(p, static_cast<int>(j)) &&
          arc_gap(p.interval(static_cast<int>(i)).arc, p.interval(static_cast<int>(j)).arc) < 1e-3)
        throw CodingError("rectangle " + p.interval(static_cast<int>(i)).label + " x " +
                          p.interval(static_cast<int>(j)).label + " touches the diagonal");
  const auto nodes = forward_nodes(t, depth);
  std::vector<cplx> parts(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t q) {
    const ForwardNode& y = nodes[q];
    const int ly = letter(p, y.word.front());
    cplx sum = 0.0;
    for (std::size_t xi = 0; xi < g.size(); ++xi) {
      if (letter(p, g.interval_of(xi)) == ly) continue;
      const double x = g.angle(xi);
      sum += t.weights[static_cast<Eigen::Index>(xi)] * integrand(x, y) * std::exp(-t.s * chord_log(x, y.theta));
    }
    parts[q] = sum * y.weight;
  });
  return sum_ordered(parts);
}

Pairing ps_pair(const Observable& a, const BoundaryFunctional& t, int depth) {
  if (depth < 0) throw DomainError("refinement depth must be nonnegative");
  const auto& p = t.partition;
  const auto tau = [&](const ForwardNode& y) { return p.log_derivative(y.word.front(), y.theta); };
  Pairing out;
  out.ps_pair_a = pair_rectangles(t, [&](double x, const ForwardNode& y) { return radon(a, x, y.theta, 0.0, tau(y)); }, depth);
  out.ps_pair_1 = pair_rectangles(t, [&](double, const ForwardNode& y) { return tau(y); }, depth);
  return out;
}

Pairing ps_pair_shifted(const Observable& a, const BoundaryFunctional& t, const std::map<std::pair<int, int>, double>& shift) {
  if (!a.stable_constant()) throw UnsupportedModeError("section shifts need a stable-constant observable");
  const auto& p = t.partition;
  const auto phi = [&](int c0, int c1) {
    const auto it = shift.find({c0, c1});
    return it == shift.end() ? 0.0 : it->second;
  };
  const auto window = [&](const Observable& obs, const ForwardNode& y) {
    const double tau = p.log_derivative(y.word[0], y.theta);
    const double lo = phi(y.word[0], y.word[1]), hi_next = phi(y.word[1], y.word[2]);
    if (lo < 0.0 || lo >= tau) throw DomainError("section shift must lie in [0, tau)");
    const double fy = std::arg(p.forward(y.word[0])(std::polar(1.0, y.theta)));
    return obs.window_integral(y.theta, lo, tau) + obs.window_integral(fy, 0.0, hi_next);
  };
  const Observable one = Observable::constant();
  Pairing out;
  out.ps_pair_a = pair_rectangles(t, [&](double, const ForwardNode& y) { return window(a, y); }, 2);
  out.ps_pair_1 = pair_rectangles(t, [&](double, const ForwardNode& y) { return window(one, y); }, 2);
  return out;
}

std::string pairing_report_json(const std::string& observable_id, cplx s_n, const Pairing& p, cplx det_ratio) {
  const auto cx = [](cplx z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; };
  const nlohmann::json j{{"resonance", cx(s_n)},
                         {"observable_id", observable_id},
                         {"ps_pair_a", cx(p.ps_pair_a)},
                         {"ps_pair_1", cx(p.ps_pair_1)},
                         {"ratio", cx(p.ratio())},
                         {"det_route_ratio", cx(det_ratio)},
                         {"discrepancy", std::abs(p.ratio() - det_ratio) / std::abs(det_ratio)}};
  return j.dump(2);
}

}  // namespace hz
