#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "hz/fuchsian_group.hpp"
#include "hz/hyperbolic_core.hpp"

namespace testing {

inline constexpr double kRefRadius = std::numbers::pi / 6.0;

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(unsigned long long seed = 12345) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  hz::BoundaryPoint boundary() { return hz::BoundaryPoint(uniform(0.0, hz::kTwoPi)); }
  hz::DiscPoint disc(double rmax = 0.95) {
    return hz::DiscPoint(std::polar(std::sqrt(uniform(0.0, 1.0)) * rmax, uniform(0.0, hz::kTwoPi)));
  }
  hz::MoebiusMap isometry(double tmax = 3.0) {
    return hz::rotation(uniform(0.0, hz::kTwoPi)) * hz::geodesic_flow(uniform(-tmax, tmax)) *
           hz::rotation(uniform(0.0, hz::kTwoPi));
  }
};

inline const hz::GroupPresentation& reference_group() {
  static const hz::GroupPresentation g = hz::symmetric_schottky(kRefRadius);
  return g;
}

}  // namespace testing
