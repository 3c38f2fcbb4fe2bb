#include "hz/hyperbolic_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hz {

namespace {

using Mat = std::array<cplx, 4>;

Mat mul(const Mat& x, const Mat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

Mat entries(const MoebiusMap& m) { return {m.a(), m.b(), m.c(), m.d()}; }

const cplx I{0.0, 1.0};

// Cayley matrix (upper half-plane -> disc) and its adjugate.
const Mat kCayley{1.0, -I, 1.0, I};
const Mat kCayleyInv{I, I, -1.0, 1.0};

double one_minus_abs2(cplx z) {
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

}  // namespace

MoebiusMap::MoebiusMap(cplx a, cplx b, cplx c, cplx d, Model model) : model_(model) {
  const cplx det = a * d - b * c;
  if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
    throw DomainError("MoebiusMap: singular or non-finite matrix");
  const cplx root = std::sqrt(det);
  a_ = a / root;
  b_ = b / root;
  c_ = c / root;
  d_ = d / root;
}

MoebiusMap MoebiusMap::identity(Model model) { return MoebiusMap(1.0, 0.0, 0.0, 1.0, model); }

MoebiusMap MoebiusMap::inverse() const { return MoebiusMap(Raw{}, d_, -b_, -c_, a_, model_); }

// Both Cayley conjugations scale the determinant by (2i)^2.
MoebiusMap MoebiusMap::to_disc() const {
  if (model_ == Model::disc) return *this;
  const Mat m = mul(mul(kCayley, entries(*this)), kCayleyInv);
  const cplx k = 2.0 * I;
  return MoebiusMap(Raw{}, m[0] / k, m[1] / k, m[2] / k, m[3] / k, Model::disc);
}

MoebiusMap MoebiusMap::to_half_plane() const {
  if (model_ == Model::half_plane) return *this;
  const Mat m = mul(mul(kCayleyInv, entries(*this)), kCayley);
  const cplx k = 2.0 * I;
  return MoebiusMap(Raw{}, m[0] / k, m[1] / k, m[2] / k, m[3] / k, Model::half_plane);
}

bool MoebiusMap::approx_equal(const MoebiusMap& o, double tol) const {
  if (model_ != o.model_) return false;
  const Mat x = entries(*this), y = entries(o);
  double minus = 0.0, plus = 0.0;
  for (int k = 0; k < 4; ++k) {
    minus += std::norm(x[k] - y[k]);
    plus += std::norm(x[k] + y[k]);
  }
  return std::sqrt(std::min(minus, plus)) < tol;
}

bool MoebiusMap::preserves_unit_circle(double tol) const {
  if (model_ != Model::disc) return false;
  for (double theta : {0.0, 2.1, 4.2}) {
    if (std::abs(std::abs(apply(std::polar(1.0, theta))) - 1.0) > tol) return false;
  }
  return true;
}

MoebiusMap operator*(const MoebiusMap& x, const MoebiusMap& y) {
  if (x.model_ != y.model_) throw DomainError("MoebiusMap product across models");
  const Mat m = mul(entries(x), entries(y));
  return MoebiusMap(MoebiusMap::Raw{}, m[0], m[1], m[2], m[3], x.model_);
}

DiscPoint::DiscPoint(cplx z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1.0 - kBoundaryGuard)
    throw DomainError("DiscPoint: |z| must be < 1 - 1e-8");
}

double reduce_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

BoundaryPoint::BoundaryPoint(double theta) : theta_(reduce_angle(theta)) {}

BoundaryPoint BoundaryPoint::from_complex(cplx b) { return BoundaryPoint(std::arg(b)); }

double BoundaryArc::offset(double theta) const { return reduce_angle(theta - lo); }

double BoundaryArc::endpoint_distance(double theta) const {
  const double o = offset(theta);
  const double to_hi = std::abs(o - width);
  return std::min({o, to_hi, kTwoPi - o});
}

double busemann(const DiscPoint& z, const BoundaryPoint& b) {
  return std::log(one_minus_abs2(z.z()) / std::norm(z.z() - b.point()));
}

double poisson_kernel(const DiscPoint& z, const BoundaryPoint& b) {
  return one_minus_abs2(z.z()) / std::norm(z.z() - b.point());
}

double hyperbolic_distance(const DiscPoint& z, const DiscPoint& w) {
  const double q = std::abs(z.z() - w.z()) / std::abs(1.0 - std::conj(w.z()) * z.z());
  return 2.0 * std::atanh(q);
}

double cosh_dist_to_geodesic(const DiscPoint& z, const BoundaryPoint& b1, const BoundaryPoint& b2) {
  const cplx p1 = b1.point(), p2 = b2.point();
  const double sep = std::abs(p1 - p2);
  if (sep < 1e-14) throw DomainError("cosh_dist_to_geodesic: degenerate geodesic b1 = b2");
  return 2.0 * std::abs(z.z() - p1) * std::abs(z.z() - p2) / (sep * one_minus_abs2(z.z()));
}

MoebiusMap rotation(double phi) {
  return MoebiusMap(std::polar(1.0, 0.5 * phi), 0.0, 0.0, std::polar(1.0, -0.5 * phi));
}

MoebiusMap geodesic_flow(double t) {
  const double ch = std::cosh(0.5 * t), sh = std::sinh(0.5 * t);
  return MoebiusMap(ch, sh, sh, ch);
}

MoebiusMap horocycle_flow(double u) {
  return MoebiusMap(1.0, u, 0.0, 1.0, Model::half_plane).to_disc();
}

MoebiusMap conjugate(const MoebiusMap& m, double phi) { return rotation(phi) * m * rotation(-phi); }

MoebiusMap frame_to_group(const GeodesicFrame& f) {
  const double beta = f.b_plus.theta();
  const double gap = reduce_angle(f.b_minus.theta() - beta);
  if (gap < 1e-12 || gap > kTwoPi - 1e-12) throw DomainError("frame_to_group: b_minus = b_plus");
  // Translate the diameter (-1, 1) perpendicular to itself, then rotate.
  const double psi = 0.5 * (std::numbers::pi - gap);
  const double rho = 2.0 * std::atanh(std::tan(0.5 * psi));
  const double ch = std::cosh(0.5 * rho), sh = std::sinh(0.5 * rho);
  const MoebiusMap boost(ch, I * sh, -I * sh, ch);
  return rotation(beta - psi) * boost * geodesic_flow(f.t);
}

GeodesicFrame group_to_frame(const MoebiusMap& g0) {
  const MoebiusMap g = g0.to_disc();
  GeodesicFrame f;
  f.b_plus = BoundaryPoint::from_complex(g(1.0));
  f.b_minus = BoundaryPoint::from_complex(g(-1.0));
  const cplx closest = frame_to_group(f)(0.0);
  f.t = busemann(DiscPoint(g(0.0)), f.b_plus) - busemann(DiscPoint(closest), f.b_plus);
  return f;
}

double trace_length(const MoebiusMap& m) {
  const double tr = std::abs(m.trace());
  if (tr <= 2.0 + 1e-14) {
    const std::string kind = tr < 2.0 - 1e-12 ? "elliptic" : "parabolic";
    throw NotHyperbolicError("trace_length: element is " + kind, kind);
  }
  return 2.0 * std::acosh(0.5 * tr);
}

double boundary_derivative(const MoebiusMap& m, const BoundaryPoint& b) {
  if (m.model() != Model::disc) throw DomainError("boundary_derivative: disc model required");
  return 1.0 / std::norm(m.c() * b.point() + m.d());
}

double log_boundary_derivative(const MoebiusMap& m, double theta) {
  return -std::log(std::norm(m.c() * std::polar(1.0, theta) + m.d()));
}

BoundaryArc arc_image(const MoebiusMap& m, const BoundaryArc& arc) {
  const double lo = std::arg(m(std::polar(1.0, arc.lo)));
  const double hi = std::arg(m(std::polar(1.0, arc.hi())));
  BoundaryArc out{reduce_angle(lo), reduce_angle(hi - lo)};
  if (out.width == 0.0 && arc.width > std::numbers::pi) out.width = kTwoPi;
  return out;
}

namespace {

template <class Better>
double extremal_log_derivative(const MoebiusMap& m, const BoundaryArc& arc, double critical,
                               Better better) {
  double best = log_boundary_derivative(m, arc.lo);
  const double at_hi = log_boundary_derivative(m, arc.hi());
  if (better(at_hi, best)) best = at_hi;
  if (arc.contains(critical)) {
    const double v = log_boundary_derivative(m, critical);
    if (better(v, best)) best = v;
  }
  return best;
}

}  // namespace

double min_log_derivative_on_arc(const MoebiusMap& m, const BoundaryArc& arc) {
  if (std::abs(m.c()) < 1e-300) return -std::log(std::norm(m.d()));
  // |c e^{i theta} + d| is largest where e^{i theta} points along d/c.
  return extremal_log_derivative(m, arc, std::arg(m.d() / m.c()), std::less<>());
}

double max_log_derivative_on_arc(const MoebiusMap& m, const BoundaryArc& arc) {
  if (std::abs(m.c()) < 1e-300) return -std::log(std::norm(m.d()));
  return extremal_log_derivative(m, arc, std::arg(-m.d() / m.c()), std::greater<>());
}

cplx cayley_to_disc(cplx z) { return (z - I) / (z + I); }

cplx cayley_to_half_plane(cplx w) { return I * (1.0 + w) / (1.0 - w); }

}  // namespace hz
