// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shearlab/transform.hpp"

namespace shearlab {

using Point3 = std::array<double, 3>;

struct Harmonic {
  int n = 1;
  double a = 0.0;  // cos coefficient
  double b = 0.0;  // sin coefficient
};

/// Star-shaped boundary r = rho(theta) around a center. The constant term is
/// rho0 - sum(|a_n| + |b_n|), so rho <= rho0 holds for every theta without
/// sampling, and zero harmonics give the circle of radius rho0.
struct RadiusFunction {
  double rho0 = 0.4;
  std::vector<Harmonic> harmonics;

  double base() const;
  double operator()(double theta) const;
  double derivative(double theta) const;
  double second_derivative(double theta) const;
  /// max |rho''| on an equispaced grid, plus the worst-case gap between grid
  /// points (half a spacing times the bound sum n^3 (|a_n| + |b_n|) on rho''').
  double curvature_bound(int grid = 4096) const;
};

/// Smooth bump amplitude * (1 - |(x - center) / radius|^2)^3, zero outside.
struct Bump {
  Point3 center{0.5, 0.5, 0.5};
  double radius = 0.5;
  double amplitude = 1.0;

  double operator()(const Point3& x, int dim) const;
  /// sum over |alpha| <= 2 of sup |D^alpha bump| from the closed-form maxima
  /// of the profile and its derivatives.
  double c2_norm(int dim) const;
};

enum class SurfaceKind { Sphere, RoundedCube };

/// Closed surface of a 3D cartoon. Sphere: r = r0 (1 + eps P(u)) with P a
/// polynomial in the unit direction u and sum |coeffs| = 1, so |P| <= 1.
/// RoundedCube: intersection of `patches` balls of radius R whose
/// boundaries sit at distance `half_width` from the center along +-x, +-y,
/// +-z; every face is a spherical patch of curvature 1/R.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::Sphere;
  double r0 = 0.3;
  double eps = 0.0;
  std::vector<std::array<int, 3>> monomials;
  std::vector<double> coeffs;
  double R = 0.5;
  double half_width = 0.25;
  int patches = 6;

  /// Radius of the sphere model in direction u (unit vector).
  double radius(const Point3& u) const;
  /// Membership test for the offset x - center.
  bool inside(const Point3& offset) const;
  /// Largest |principal curvature| over a (theta, phi) grid, from finite
  /// differences of the level-set function. Sphere model only; the rounded
  /// cube returns 1 / R.
  double max_principal_curvature(int grid = 96) const;
  double max_extent() const;
};

/// f = f0 + f1 * chi_B with B = center + {boundary}.
struct CartoonSpec {
  int dim = 2;
  double nu = 10.0;
  Point3 center{0.5, 0.5, 0.5};
  RadiusFunction boundary;  // 2D
  SurfaceSpec surface;      // 3D
  Bump f0, f1;
  int pieces = 1;
  std::uint64_t seed = 0;

  bool inside(const Point3& x) const;
  /// Exact value of the cartoon at x in [0,1]^dim.
  double value(const Point3& x) const;
  /// Re-checks curvature, containment and C2 norms independently of how the
  /// spec was built. Throws ConstraintError naming the first failure.
  void validate() const;

  std::string to_text() const;
  static CartoonSpec from_text(const std::string& text);
};

/// Seeded star-shaped boundary: harmonics of degree 1..6, rescaled so that
/// the grid bound on |rho''| is 0.9 nu and rho stays positive.
RadiusFunction random_star_set(double nu, std::uint64_t seed);

/// Seeded 2D cartoon: random star set centered at (1/2, 1/2), f1 a bump of
/// radius 1/2 about that center, f0 a bump at a random position.
CartoonSpec random_cartoon_2d(double nu, std::uint64_t seed);

/// Seeded 3D cartoon. pieces = 1 gives a perturbed sphere with principal
/// curvatures at most 0.9 nu; pieces > 1 gives a rounded cube made of
/// min(pieces, 6) spherical patches.
CartoonSpec surface_cartoon_3d(double nu, int pieces, std::uint64_t seed);

/// Pixel values f0(x) + f1(x) * a(x) at pixel centers, a the fraction of a
/// 4^dim subsample grid inside B. Extents must be powers of two.
Raster rasterize_cartoon(const CartoonSpec& spec, std::size_t n);

/// Squared L2 distance between a raster (piecewise constant on pixels) and
/// the exact cartoon, by midpoint quadrature with `sub` points per pixel axis.
double raster_l2_error(const CartoonSpec& spec, const Raster& r, int sub);

}  // namespace shearlab
