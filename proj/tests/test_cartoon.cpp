// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearlab/cartoon.hpp"
#include "shearlab/errors.hpp"

using namespace shearlab;

namespace {

constexpr double kPi = std::numbers::pi;

// rho'' by a five-point stencil on rho, independent of the closed form.
double fd_second(const RadiusFunction& r, double t) {
  const double h = 1e-3;
  return (-r(t + 2 * h) + 16 * r(t + h) - 30 * r(t) + 16 * r(t - h) - r(t - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("cartoon generation is a pure function of its seed") {
  const CartoonSpec a = random_cartoon_2d(10.0, 42), b = random_cartoon_2d(10.0, 42);
  CHECK(a.to_text() == b.to_text());
  CHECK(random_cartoon_2d(10.0, 43).to_text() != a.to_text());
  const Raster ra = rasterize_cartoon(a, 64), rb = rasterize_cartoon(b, 64);
  CHECK(ra.data == rb.data);

  const CartoonSpec s3 = surface_cartoon_3d(10.0, 1, 5);
  CHECK(s3.to_text() == surface_cartoon_3d(10.0, 1, 5).to_text());
}

TEST_CASE("raster values do not depend on the thread count") {
  const CartoonSpec c = random_cartoon_2d(10.0, 9);
  const int saved = num_threads();
  set_num_threads(1);
  const Raster one = rasterize_cartoon(c, 64);
  set_num_threads(3);
  const Raster three = rasterize_cartoon(c, 64);
  set_num_threads(saved);
  CHECK(one.data == three.data);
}

TEST_CASE("zero harmonics give the circle of radius rho0") {
  RadiusFunction r;
  for (double t = 0.0; t < 2 * kPi; t += 0.1) {
    CHECK(r(t) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(r.derivative(t) == 0.0);
    CHECK(r.second_derivative(t) == 0.0);
  }
  CHECK(r.curvature_bound() == 0.0);
}

TEST_CASE("closed-form derivatives of rho agree with finite differences") {
  const RadiusFunction r = random_star_set(10.0, 3);
  REQUIRE(!r.harmonics.empty());
  for (double t = 0.05; t < 2 * kPi; t += 0.37) {
    const double h = 1e-5;
    CHECK(r.derivative(t) == doctest::Approx((r(t + h) - r(t - h)) / (2 * h)).epsilon(1e-6));
    CHECK(r.second_derivative(t) == doctest::Approx(fd_second(r, t)).epsilon(1e-5));
  }
}

TEST_CASE("star sets respect the curvature budget of 0.9 nu") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RadiusFunction r = random_star_set(10.0, seed);
    double worst = 0.0, lo = 1e9, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double t = 2 * kPi * (i + 0.37) / 20000;
      worst = std::max(worst, std::abs(r.second_derivative(t)));
      lo = std::min(lo, r(t));
      hi = std::max(hi, r(t));
    }
    CHECK(worst <= 9.0 + 1e-9);
    CHECK(lo > 0.0);
    CHECK(hi <= 0.4 + 1e-15);
    CHECK(r.base() > 0.0);
  }
}

TEST_CASE("membership at analytic points and the jump along a ray") {
  const CartoonSpec c = random_cartoon_2d(10.0, 11);
  CHECK(c.inside(c.center));
  for (double t = 0.1; t < 2 * kPi; t += 0.5) {
    const double rho = c.boundary(t);
    const Point3 in{c.center[0] + 0.98 * rho * std::cos(t), c.center[1] + 0.98 * rho * std::sin(t), 0};
    const Point3 out{c.center[0] + 1.02 * rho * std::cos(t), c.center[1] + 1.02 * rho * std::sin(t), 0};
    CHECK(c.inside(in));
    CHECK_FALSE(c.inside(out));

    // Straddling the boundary by 1e-9 the value jumps by f1 there.
    const Point3 a{c.center[0] + (rho - 1e-9) * std::cos(t), c.center[1] + (rho - 1e-9) * std::sin(t), 0};
    const Point3 b{c.center[0] + (rho + 1e-9) * std::cos(t), c.center[1] + (rho + 1e-9) * std::sin(t), 0};
    CHECK(c.value(a) - c.value(b) == doctest::Approx(c.f1(a, 2)).epsilon(1e-6));
  }
}

TEST_CASE("bump C2 norm agrees with a finite-difference estimate") {
  for (int dim : {2, 3}) {
    Bump b{{0.5, 0.5, 0.5}, 0.3, 1.0};
    // Sup of value, gradient and Hessian entries, sampled along the first
    // axis (the profile is radial, so the extrema lie on any ray).
    double v = 0, g = 0, hd = 0, hm = 0;
    const double h = 1e-4;
    for (int i = 0; i <= 3000; ++i) {
      const double s = 0.3 * i / 3000.0;
      Point3 x{0.5 + s, 0.5, 0.5};
      Point3 xp = x, xm = x;
      xp[0] += h;
      xm[0] -= h;
      v = std::max(v, std::abs(b(x, dim)));
      g = std::max(g, std::abs((b(xp, dim) - b(xm, dim)) / (2 * h)));
      hd = std::max(hd, std::abs((b(xp, dim) - 2 * b(x, dim) + b(xm, dim)) / (h * h)));
      // Mixed partial at 45 degrees, where it peaks.
      const double q = s / std::sqrt(2.0);
      auto at = [&](double dx, double dy) { return b({0.5 + q + dx, 0.5 + q + dy, 0.5}, dim); };
      hm = std::max(hm, std::abs((at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h)));
    }
    const double mixed = dim * (dim - 1) / 2.0;
    const double fd = v + dim * g + dim * hd + mixed * hm;
    // The closed form bounds each term by its own supremum, so it is an
    // upper bound that the sampled sum approaches but never exceeds.
    CHECK(b.c2_norm(dim) >= fd * (1 - 1e-6));
    CHECK(b.c2_norm(dim) <= fd * 1.05);
  }
}

TEST_CASE("generated cartoons pass the independent validator") {
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    CHECK_NOTHROW(random_cartoon_2d(10.0, seed).validate());
    CHECK_NOTHROW(random_cartoon_2d(2.0, seed).validate());
  }
  CHECK_NOTHROW(surface_cartoon_3d(10.0, 1, 4).validate());
  CHECK_NOTHROW(surface_cartoon_3d(10.0, 6, 4).validate());

  CartoonSpec loud = random_cartoon_2d(10.0, 1);
  loud.f1.amplitude *= 3.0;
  CHECK_THROWS_AS(loud.validate(), ConstraintError);

  CartoonSpec bent = random_cartoon_2d(10.0, 1);
  bent.nu = 0.5 * bent.boundary.curvature_bound();
  CHECK_THROWS_AS(bent.validate(), ConstraintError);
}

TEST_CASE("perturbed sphere: eps = 0 has curvature 1/r0") {
  SurfaceSpec s;
  s.r0 = 0.35;
  s.eps = 0.0;
  s.monomials = {{2, 0, 0}};
  s.coeffs = {1.0};
  CHECK(s.max_principal_curvature() == doctest::Approx(1.0 / 0.35).epsilon(1e-4));
  CHECK(s.inside({0.34, 0, 0}));
  CHECK_FALSE(s.inside({0.36, 0, 0}));

  const CartoonSpec c = surface_cartoon_3d(10.0, 1, 2);
  CHECK(c.surface.max_principal_curvature() <= 0.9 * 10.0 + 1e-9);
}

TEST_CASE("rounded cube: faces at the half width, corners cut") {
  const CartoonSpec c = surface_cartoon_3d(10.0, 6, 1);
  REQUIRE(c.surface.kind == SurfaceKind::RoundedCube);
  const double w = c.surface.half_width;
  CHECK(c.surface.inside({0, 0, 0}));
  CHECK(c.surface.inside({w - 1e-6, 0, 0}));
  CHECK_FALSE(c.surface.inside({w + 1e-6, 0, 0}));
  CHECK_FALSE(c.surface.inside({0, 0, -w - 1e-6}));
  CHECK_FALSE(c.surface.inside({w, w, w}));
  CHECK(c.surface.max_principal_curvature() == doctest::Approx(1.0 / c.surface.R));
  CHECK_THROWS_AS(surface_cartoon_3d(1.0, 6, 1), ConstraintError);
}

TEST_CASE("text form round-trips exactly") {
  for (const CartoonSpec& c : {random_cartoon_2d(10.0, 5), surface_cartoon_3d(10.0, 1, 5),
                               surface_cartoon_3d(10.0, 3, 5)}) {
    const CartoonSpec back = CartoonSpec::from_text(c.to_text());
    CHECK(back.to_text() == c.to_text());
    CHECK(rasterize_cartoon(back, 16).data == rasterize_cartoon(c, 16).data);
  }
  CHECK_THROWS_AS(CartoonSpec::from_text("dim=2\nnu=oops\n"), FormatError);
}

TEST_CASE("rasterization error halves per refinement in squared L2") {
  const CartoonSpec c = random_cartoon_2d(10.0, 7);
  const double e32 = raster_l2_error(c, rasterize_cartoon(c, 32), 8);
  const double e64 = raster_l2_error(c, rasterize_cartoon(c, 64), 8);
  const double e128 = raster_l2_error(c, rasterize_cartoon(c, 128), 8);
  CHECK(e64 / e32 >= 0.3);
  CHECK(e64 / e32 <= 0.7);
  CHECK(e128 / e64 >= 0.3);
  CHECK(e128 / e64 <= 0.7);
}
