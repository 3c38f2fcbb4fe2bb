#include <doctest.h>

#include <cmath>

#include "hz/zeta_functions.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace hz;
using testing::reference_group;

namespace {

const MarkovPartition& partition() {
  static const MarkovPartition p = schottky_partition(reference_group());
  return p;
}

const OrbitSpectrum& spectrum_one() {
  static const OrbitSpectrum s(partition(), 18.0);
  return s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("recoupling coefficients") {
  for (const auto& row : oracle::kRecoupling) {
    const auto b = recoupling_coefficients(row[0], 12);
    for (int n = 0; n <= 12; ++n) CHECK(std::abs(b[n] - row[n + 1]) < 1e-13 * std::max(1.0, std::abs(row[n + 1])));
  }
  for (cplx s : {cplx(1.3), cplx(0.75, 2.0), cplx(-0.4, 0.1)}) {
    CHECK(std::abs(recoupling_B(s, 0) - 1.0) < 1e-15);
    CHECK(std::abs(recoupling_B(s, 1) - (2.0 * s - 1.0) / 4.0) < 1e-15);
  }
  // partial sums against the closed form at y = 10
  for (cplx s : {cplx(1.3), cplx(0.75, 2.0)}) {
    const double y = 10.0;
    const cplx direct = std::pow(cplx(2.0 * y * (1.0 - std::sqrt(1.0 - 1.0 / y))), 2.0 * s - 1.0);
    const auto b = recoupling_coefficients(s, 12);
    cplx sum = 0.0;
    for (int n = 12; n >= 0; --n) sum = sum / y + b[n];
    CHECK(rel(sum, direct) < 1e-10);
  }
  CHECK_THROWS_AS(recoupling_coefficients(1.0, -1), DomainError);
}

TEST_CASE("orbit spectrum and counting fit") {
  const auto& sp = spectrum_one();
  CHECK(!sp.terms().empty());
  for (const auto& t : sp.terms()) {
    CHECK(t.length <= 18.0);
    // for a = 1 the orbit integral is the primitive length
    CHECK(t.observable_integral == doctest::Approx(t.primitive_length).epsilon(1e-12));
  }
  // growth exponent near the critical exponent
  CHECK(sp.counting_exponent() > 0.3);
  CHECK(sp.counting_exponent() < 0.8);
  CHECK_THROWS_AS(OrbitSpectrum(partition(), 5.0, builtin_observable("frame_mixed")), UnsupportedModeError);
}

TEST_CASE("zeta values and modes") {
  const auto& sp = spectrum_one();
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 1.5; s <= 3.0; s += 0.25) {
    const auto z = zeta(s, sp);
    CHECK(z.certified);
    CHECK(z.value.real() < prev);
    CHECK(z.value.real() > 0.0);
    prev = z.value.real();
  }
  const cplx s(1.6, 2.5);
  CHECK(std::abs(zeta(std::conj(s), sp).value - std::conj(zeta(s, sp).value)) < 1e-15);
  CHECK(std::abs(zeta2(std::conj(s), sp).value - std::conj(zeta2(s, sp).value)) < 1e-15);
  CHECK_THROWS_AS(zeta(0.9, sp), DomainError);
  const auto ex = zeta(0.9, sp, ZetaMode::exploratory);
  CHECK(!ex.certified);
  CHECK(!ex.warning.empty());
}

TEST_CASE("truncation is controlled by the tail bound") {
  const OrbitSpectrum a(partition(), 14.0), b(partition(), 16.0);
  for (double s : {1.5, 2.0}) {
    const auto za = zeta(s, a), zb = zeta(s, b);
    CHECK(za.tail_bound > 0.0);
    CHECK(std::abs(za.value - zb.value) < za.tail_bound);
    const auto wa = zeta2(s, a), wb = zeta2(s, b);
    CHECK(std::abs(wa.value - wb.value) < wa.tail_bound);
  }
}

TEST_CASE("series against the determinant continuation") {
  for (const char* id : {"one", "cos_4theta", "sigma_plus_sin2theta"}) {
    const Observable a = builtin_observable(id);
    const OrbitSpectrum sp(partition(), 18.0, a);
    const TransferOperator op(partition(), {24}, a);
    for (double s : {1.5, 2.0}) {
      const auto z1 = zeta(s, sp);
      const cplx d1 = zeta_via_determinant(s, op);
      CHECK(std::abs(z1.value - d1) <= z1.tail_bound + 1e-12);
      const auto z2 = zeta2(s, sp);
      const cplx d2 = zeta2_via_determinant(s, op);
      CHECK(std::abs(z2.value - d2) <= z2.tail_bound + 1e-12);
      CHECK(rel(z2.value, d2) < 1e-5);
    }
  }
}

TEST_CASE("rcal bounds") {
  const auto& sp = spectrum_one();
  for (double s : {1.5, 2.0, 2.5}) {
    const double r0 = rcal(s, 0, sp).value.real(), r4 = rcal(s, 4, sp).value.real();
    const double z = zeta(s, sp).value.real();
    CHECK(r4 <= r0);
    // cosh(L/2)^{1-2s}/sinh(L/2) <= 2^{2s} e^{-sL}/(1 - e^{-L})
    CHECK(r0 <= std::pow(2.0, 2.0 * s) * z);
    // 1 - tanh(L/2)^2 = 1/cosh^2(L/2) <= 4 e^{-L}
    double bound = 0.0;
    for (const auto& t : sp.terms()) {
      const double h = 0.5 * t.length;
      bound += 4.0 * std::exp(-t.length) * t.observable_integral / std::sinh(h) * std::pow(std::cosh(h), 1.0 - 2.0 * s);
    }
    CHECK(r0 - r4 <= bound);
  }
}

TEST_CASE("determinant products") {
  const auto& sp = spectrum_one();
  const TransferOperator op(partition(), {24});
  for (double s : {1.5, 2.0}) {
    const cplx logd = std::log(op.determinant(s));
    const auto orb = log_orbit_sum_exponential(s, partition(), 0, 1e-8);
    CHECK(orb.tail_bound < 1e-8);
    CHECK(std::abs(logd - orb.log_value) <= orb.tail_bound + 1e-12);
    const auto eul = log_euler_product(s, sp);
    CHECK(std::abs(logd - eul.log_value) <= eul.tail_bound + 1e-12);
    // the double product is the single one shifted
    cplx shifted = 0.0;
    for (int n = 0; n < 40; ++n) shifted += std::log(op.determinant(s + n));
    const auto dbl = log_euler_product_double(s, sp);
    CHECK(std::abs(shifted - dbl.log_value) <= dbl.tail_bound + 1e-12);
  }
  CHECK(log_euler_product(2.0, sp).tail_bound < 1e-6);
}

TEST_CASE("zeta2 residue at the ground resonance") {
  const TransferOperator one(partition(), {24});
  const cplx delta = refine_zero(one, 0.5);
  const auto r1 = zeta2_residue(delta, one);
  CHECK(r1.discrepancy < 1e-10);
  CHECK(std::abs(r1.value - 4.0) < 1e-8);
  const Observable a = builtin_observable("sigma_plus_sin2theta");
  const TransferOperator op(partition(), {24}, a);
  const auto ra = zeta2_residue(delta, op);
  const cplx det_ratio = residue_via_determinant(op, delta).value / residue_via_determinant(one, delta).value;
  CHECK(rel(ra.value / r1.value, det_ratio) < 1e-7);
}
