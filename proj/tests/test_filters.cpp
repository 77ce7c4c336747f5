// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "shearlab/errors.hpp"
#include "shearlab/filters.hpp"

using namespace shearlab;
namespace mp = boost::multiprecision;

namespace {

// Exact value of the squared low-pass magnitude at xi = 1/4, where
// cos^2 = sin^2 = 1/2.
double exact_quarter(int K, int L) {
  mp::cpp_rational sum = 0;
  mp::cpp_int binom = 1;
  for (int n = 0; n < L; ++n) {
    if (n > 0) binom = binom * (K - 1 + n) / n;
    sum += mp::cpp_rational(binom, mp::cpp_int(1) << n);
  }
  sum /= mp::cpp_rational(mp::cpp_int(1) << K);
  return static_cast<double>(sum);
}

// 50-digit closed form at arbitrary xi.
double closed_form_50(int K, int L, double xi) {
  using F = mp::cpp_bin_float_50;
  const F arg = boost::math::constants::pi<F>() * F(xi);
  const F s2 = mp::pow(mp::sin(arg), 2);
  const F c2 = mp::pow(mp::cos(arg), 2);
  F sum = 0, binom = 1, pw = 1;
  for (int n = 0; n < L; ++n) {
    if (n > 0) binom = binom * (K - 1 + n) / n;
    sum += binom * pw;
    pw *= s2;
  }
  return static_cast<double>(mp::pow(c2, K) * sum);
}

}  // namespace

TEST_CASE("squared low-pass closed form") {
  CHECK(squared_lowpass_magnitude(15, 10, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(squared_lowpass_magnitude(15, 10, 0.5)) < 1e-30);
  const double v = exact_quarter(15, 10);
  CHECK(std::abs(squared_lowpass_magnitude(15, 10, 0.25) - v) <= 1e-12 * v);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double xi = u(rng);
    const double a = squared_lowpass_magnitude(39, 19, xi);
    CHECK(a >= 0.0);
    CHECK(a == squared_lowpass_magnitude(39, 19, -xi));
    const double ref = closed_form_50(39, 19, xi);
    CHECK(std::abs(a - ref) <= 1e-13 * std::max(ref, 1e-300) + 1e-300);
  }
}

TEST_CASE("order constraints") {
  CHECK_THROWS_AS(validate_orders(9, 7), ConstraintError);
  CHECK_NOTHROW(validate_orders(9, 7, true));
  CHECK_THROWS_AS(validate_orders(14, 10), ConstraintError);  // 2K < 3L
  CHECK_THROWS_AS(validate_orders(29, 10), ConstraintError);  // K > 3L-2
  CHECK_NOTHROW(validate_orders(39, 19));
  CHECK_THROWS_AS(spectral_factorize(9, 7), ConstraintError);
}

TEST_CASE("spectral factorization matches the closed form") {
  for (auto [K, L] : {std::pair{15, 10}, std::pair{30, 15}, std::pair{39, 19}}) {
    const FilterPair p = spectral_factorize(K, L);
    CHECK(p.h0.size() == static_cast<std::size_t>(K + L));
    double dc = 0.0;
    for (double h : p.h0) dc += h;
    CHECK(dc == doctest::Approx(1.0).epsilon(1e-12));
    double worst = 0.0;
    for (int i = 0; i < 4096; ++i) {
      const double xi = i / 4096.0 - 0.5;
      worst = std::max(worst, std::abs(std::norm(p.m0(xi)) - closed_form_50(K, L, xi)));
    }
    CHECK(worst < 1e-8);
    // Band-pass relation |m1(xi)|^2 = |m0(xi + 1/2)|^2.
    for (double xi : {0.0, 0.1, 0.3, 0.77})
      CHECK(std::norm(p.m1(xi)) == doctest::Approx(std::norm(p.m0(xi + 0.5))).epsilon(1e-12));
    // Minimum phase concentrates energy at the start: every partial energy
    // dominates that of the time-reversed filter (same magnitude response).
    double e = 0.0, er = 0.0;
    bool dominates = true;
    for (std::size_t n = 0; n < p.h0.size(); ++n) {
      e += p.h0[n] * p.h0[n];
      er += p.h0[p.h0.size() - 1 - n] * p.h0[p.h0.size() - 1 - n];
      dominates = dominates && e >= er - 1e-15;
    }
    CHECK(dominates);
  }
  // Relaxed K = L reproduces the Daubechies-4 low-pass (normalized to DC gain 1).
  const FilterPair db2 = spectral_factorize(2, 2, true);
  const double s3 = std::sqrt(3.0);
  const double ref[4] = {(1 + s3) / 8, (3 + s3) / 8, (3 - s3) / 8, (1 - s3) / 8};
  for (int n = 0; n < 4; ++n) CHECK(db2.h0[n] == doctest::Approx(ref[n]).epsilon(1e-13));
}

TEST_CASE("scaling spectrum") {
  const auto p = std::make_shared<FilterPair>(spectral_factorize(15, 10));
  CHECK(std::abs(scaling_spectrum(*p, 0.0, 20) - 1.0) < 1e-15);
  CHECK(std::abs(scaling_spectrum(*p, 0.25, 20) - scaling_spectrum(*p, 0.25, 40)) < 1e-10);
  CHECK(std::abs(scaling_spectrum(*p, 1024.0)) < 1e-6);
  // Zeros at nonzero half-integers.
  CHECK(std::abs(scaling_spectrum(*p, 0.5)) < 1e-12);
  CHECK(std::abs(scaling_spectrum(*p, 1.5)) < 1e-12);

  const ScalingTable table(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x = i < 1000 ? u(rng) / 10.0 : u(rng);
    worst = std::max(worst, std::abs(table(x) - scaling_spectrum(*p, x)));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("compact generators") {
  const auto p = std::make_shared<FilterPair>(spectral_factorize(39, 19));
  const Generator psi = compact_shearlet_2d(p);
  CHECK(std::abs(psi({0.0, 0.3, 0})) < 1e-15);
  for (double x1 : {0.07, 0.13, 0.2})
    for (double x2 : {0.01, 0.06, 0.11})
      CHECK(std::abs(psi({x1, x2, 0})) == doctest::Approx(std::abs(psi({x1, -x2, 0}))));
  // Real spatial function: conjugate-symmetric spectrum.
  CHECK(std::abs(psi({0.1, 0.05, 0}) - std::conj(psi({-0.1, -0.05, 0}))) < 1e-15);
  MESSAGE("fitted alpha=" << psi.decay.alpha << " gamma=" << psi.decay.gamma << " C=" << psi.decay.C);
  CHECK(psi.decay.gamma >= 4.0);
  CHECK(psi.decay.alpha > psi.decay.gamma);
  CHECK(psi.decay.gamma > 3.0);
  CHECK(psi.decay.sparsity_grade);
  // Envelope bound holds on random probes.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 300; ++i) {
    const double x1 = std::exp2(u(rng)), x2 = std::exp2(u(rng));
    const auto& d = psi.decay;
    const double bound = d.C * std::min(1.0, std::pow(x1, d.alpha)) *
                         std::min(1.0, std::pow(x1, -d.gamma)) * std::min(1.0, std::pow(x2, -d.gamma));
    CHECK(psi.magnitude({x1, x2, 0}) <= 1.5 * bound + 1e-300);
  }

  const auto three = compact_shearlets_3d(p);
  CHECK(std::abs(three[0]({0.0, 0.2, -0.1})) < 1e-15);
  CHECK(three[0].decay.alpha > 8.0);
  for (Vec3 xi : {Vec3{0.1, 0.02, -0.03}, Vec3{-0.2, 0.05, 0.01}}) {
    CHECK(std::abs(three[1](xi) - three[0]({xi[1], xi[0], xi[2]})) < 1e-15);
    CHECK(std::abs(three[2](xi) - three[0]({xi[2], xi[1], xi[0]})) < 1e-15);
  }
}

TEST_CASE("classical band-limited generators") {
  for (double xi : {1.0, 0.3, 0.77, 5.0, 1e-2, 200.0}) {
    double s = 0.0;
    for (int j = -20; j <= 20; ++j) s += std::pow(classical_psi1(std::ldexp(xi, -j)), 2);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (int i = 0; i < 64; ++i) {
    const double t = -1.0 + 2.0 * i / 63.0;
    const double s = std::pow(classical_psi2(t), 2) + std::pow(classical_psi2(t + 1), 2) +
                     std::pow(classical_psi2(t - 1), 2);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  auto [phi, psi] = classical_bandlimited_2d();
  CHECK(std::abs(psi({0.1, 0.0, 0})) == 0.0);
  CHECK(std::abs(psi({0.1, 0.05, 0})) == 0.0);
  CHECK(std::abs(phi({0.0, 0.0, 0})) == 1.0);
  // Low-pass telescoping: Phi(s)^2 + sum_{j>=0} psi1(2^-j s)^2 = 1.
  for (double s : {0.01, 0.2, 0.9, 3.0, 17.0}) {
    double acc = std::pow(classical_lowpass(s), 2);
    for (int j = 0; j < 40; ++j) acc += std::pow(classical_psi1(std::ldexp(s, -j)), 2);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
  }
}
