#pragma once

#include <complex>
#include <numbers>

#include "hz/errors.hpp"

namespace hz {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Model tag carried by every group element. Disc maps live in SU(1,1), half-plane maps in SL(2,R).
enum class Model { disc, half_plane };

/**
 * Unit-determinant 2x2 complex matrix modulo sign.
 *
 * Construction divides by a square root of the determinant. Equality is
 * projective: M and -M compare equal.
 */
class MoebiusMap {
 public:
  MoebiusMap() = default;
  MoebiusMap(cplx a, cplx b, cplx c, cplx d, Model model = Model::disc);

  static MoebiusMap identity(Model model = Model::disc);

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }
  Model model() const { return model_; }

  cplx apply(cplx z) const { return (a_ * z + b_) / (c_ * z + d_); }
  cplx operator()(cplx z) const { return apply(z); }
  cplx det() const { return a_ * d_ - b_ * c_; }
  cplx trace() const { return a_ + d_; }
  MoebiusMap inverse() const;

  MoebiusMap to_disc() const;
  MoebiusMap to_half_plane() const;

  /// Frobenius distance after sign alignment below tol.
  bool approx_equal(const MoebiusMap& other, double tol = 1e-10) const;
  bool operator==(const MoebiusMap& other) const { return approx_equal(other); }

  /// |M(b)| = 1 for sampled |b| = 1; only meaningful for disc maps.
  bool preserves_unit_circle(double tol = 1e-12) const;

  friend MoebiusMap operator*(const MoebiusMap& x, const MoebiusMap& y);

 private:
  struct Raw {};
  // Entries already have unit determinant; renormalizing long products would amplify rounding.
  MoebiusMap(Raw, cplx a, cplx b, cplx c, cplx d, Model model) : a_(a), b_(b), c_(c), d_(d), model_(model) {}

  cplx a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
  Model model_ = Model::disc;
};

/// Point of the open unit disc; inputs with |z| > 1 - 1e-8 are rejected.
class DiscPoint {
 public:
  static constexpr double kBoundaryGuard = 1e-8;
  explicit DiscPoint(cplx z);
  cplx z() const { return z_; }

 private:
  cplx z_;
};

/// b = e^{i theta}, theta stored in [0, 2pi).
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  explicit BoundaryPoint(double theta);
  static BoundaryPoint from_complex(cplx b);
  double theta() const { return theta_; }
  cplx point() const { return std::polar(1.0, theta_); }

 private:
  double theta_ = 0.0;
};

struct GeodesicFrame {
  BoundaryPoint b_minus;
  BoundaryPoint b_plus;
  double t = 0.0;
};

/// Counterclockwise arc [lo, lo + width) on the circle.
struct BoundaryArc {
  double lo = 0.0;
  double width = 0.0;

  double hi() const { return lo + width; }
  double center() const { return lo + 0.5 * width; }
  /// Offset of theta from lo, reduced to [0, 2pi).
  double offset(double theta) const;
  bool contains(double theta) const { return offset(theta) < width; }
  /// Distance (in angle) from theta to the nearest endpoint.
  double endpoint_distance(double theta) const;
};

double reduce_angle(double theta);

// Horocycle bracket <z,b> = log[(1-|z|^2)/|z-b|^2]. Metric ds^2 = 4|dz|^2/(1-|z|^2)^2.
double busemann(const DiscPoint& z, const BoundaryPoint& b);
double poisson_kernel(const DiscPoint& z, const BoundaryPoint& b);
double hyperbolic_distance(const DiscPoint& z, const DiscPoint& w);

/// cosh of the distance from z to the geodesic with endpoints b1, b2.
double cosh_dist_to_geodesic(const DiscPoint& z, const BoundaryPoint& b1, const BoundaryPoint& b2);

/// g(b', b) a_t; frame(-1, 1, 0) is the identity.
MoebiusMap frame_to_group(const GeodesicFrame& f);
/// Endpoints g(-1), g(1) and signed arclength from the point of the geodesic closest to 0.
GeodesicFrame group_to_frame(const MoebiusMap& g);

/// 2 arccosh(|tr|/2); throws NotHyperbolicError for |tr| <= 2.
double trace_length(const MoebiusMap& m);

/// |M'(b)| for the circle action in the angle coordinate (disc maps only).
double boundary_derivative(const MoebiusMap& m, const BoundaryPoint& b);
double log_boundary_derivative(const MoebiusMap& m, double theta);

/// Image of an arc under an orientation preserving disc map.
BoundaryArc arc_image(const MoebiusMap& m, const BoundaryArc& arc);
/// Exact minimum of log|M'| over a closed arc (the modulus is unimodal on the circle).
double min_log_derivative_on_arc(const MoebiusMap& m, const BoundaryArc& arc);
double max_log_derivative_on_arc(const MoebiusMap& m, const BoundaryArc& arc);

// Group elements in the disc model.
MoebiusMap rotation(double phi);            // z -> e^{i phi} z
MoebiusMap geodesic_flow(double t);         // a_t: translation toward +1 by arclength t
MoebiusMap horocycle_flow(double u);        // n_u: fixes +1
MoebiusMap conjugate(const MoebiusMap& m, double phi);  // R_phi m R_{-phi}

// Cayley transform z -> (z - i)/(z + i) from the upper half-plane to the disc.
cplx cayley_to_disc(cplx z);
cplx cayley_to_half_plane(cplx w);

}  // namespace hz
