// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include <cmath>
#include <random>

#include "doctest.h"
#include "shearlab/errors.hpp"
#include "shearlab/systems.hpp"

using namespace shearlab;

namespace {

bool same(const Matrix& a, const Matrix& b, double tol = 0.0) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      if (std::abs(a(i, j) - b(i, j)) > tol) return false;
  return true;
}

Matrix diag(std::initializer_list<double> v) {
  Matrix m;
  m.dim = static_cast<int>(v.size());
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

}  // namespace

TEST_CASE("scaling and shear matrices") {
  CHECK(same(scaling_matrix(2, Variant::Standard, 2), diag({4, 2})));
  CHECK(same(scaling_matrix(2, Variant::Tilde, 2), diag({2, 4})));
  CHECK(same(scaling_matrix(3, Variant::Standard, 0), Matrix::identity(3)));
  CHECK(same(scaling_matrix(3, Variant::Breve, 2), diag({2, 2, 4})));
  for (int j = 0; j < 8; ++j) {
    CHECK(scaling_matrix(2, Variant::Tilde, j).determinant() ==
          doctest::Approx(std::exp2(1.5 * j)));
    CHECK(scaling_matrix(3, Variant::Standard, j).determinant() == doctest::Approx(std::exp2(2.0 * j)));
  }

  const Vec3 v = shear_matrix(2, Variant::Standard, {1, 0}) * Vec3{1, 1, 0};
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 1.0);
  const Matrix s3 = shear_matrix(3, Variant::Standard, {1, 2});
  CHECK(s3(0, 0) == 1.0);
  CHECK(s3(0, 1) == 1.0);
  CHECK(s3(0, 2) == 2.0);

  // Group property and determinant one for every variant.
  for (int d : {2, 3})
    for (int var = 0; var < d; ++var)
      for (int k1 = -3; k1 <= 3; ++k1)
        for (int k2 = (d == 3 ? -3 : 0); k2 <= (d == 3 ? 3 : 0); ++k2) {
          const auto V = static_cast<Variant>(var);
          const Matrix a = shear_matrix(d, V, {k1, k2});
          CHECK(a.determinant() == 1.0);
          CHECK(same(a * shear_matrix(d, V, {-k1, -k2}), Matrix::identity(d)));
        }

  // Lattice preservation: integer vectors map to integer vectors and back.
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> u(-50, 50);
  for (int t = 0; t < 200; ++t) {
    const std::array<int, 2> k{u(rng) % 5, u(rng) % 5};
    const auto V = static_cast<Variant>(t % 3);
    const Vec3 x{double(u(rng)), double(u(rng)), double(u(rng))};
    const Vec3 y = shear_matrix(3, V, k) * x;
    for (double c : y) CHECK(c == std::round(c));
    const Vec3 back = shear_matrix(3, V, {-k[0], -k[1]}) * y;
    for (int a = 0; a < 3; ++a) CHECK(back[a] == x[a]);
  }

  CHECK_THROWS_AS(scaling_matrix(2, Variant::Breve, 1), ConstraintError);
  CHECK(same(sampling_matrix(3, Variant::Tilde, 1.5, 0.5), diag({0.5, 1.5, 0.5})));
}

TEST_CASE("shear range and counts") {
  CHECK(shear_range(0) == 1);
  CHECK(shear_range(2) == 2);
  CHECK(shear_range(3) == 3);
  CHECK(shear_range(5) == 6);
  CHECK(shear_range(10) == 32);

  SystemSpec s;
  s.J_max = 1;
  s.extent = 8;
  const ShearletSystem one(s);
  int per_pair = 0;
  for (const Band& b : one.bands()) per_pair += b.region == 1;
  CHECK(per_pair == 3);

  SystemSpec s3;
  s3.dim = 3;
  s3.J_max = 3;
  s3.extent = 8;
  const ShearletSystem three(s3);
  for (int r = 1; r <= 3; ++r) {
    int at2 = 0;
    for (const Band& b : three.bands()) at2 += b.region == r && b.j == 2;
    CHECK(at2 == 25);
  }
}

TEST_CASE("band layout matches a nested-loop oracle") {
  for (int d : {2, 3}) {
    SystemSpec s;
    s.dim = d;
    s.extent = d == 2 ? 64 : 16;
    s.c1 = 1.0;
    s.c2 = d == 2 ? 0.5 : 1.0;
    const ShearletSystem sys(s);
    const double h = sys.spacing();
    const std::size_t n = s.extent;

    // Independent recount from the definitions: per band, the number of
    // lattice points per axis is n / (power of two not above spacing / h).
    auto points = [&](double spacing) {
      std::size_t dec = 1;
      while (2 * dec <= n && 2.0 * dec * h <= spacing * (1 + 1e-9)) dec *= 2;
      return n / dec;
    };
    std::size_t expected = 1;
    for (int a = 0; a < d; ++a) expected *= points(s.c1);
    std::size_t bands = 1;
    for (int r = 0; r < d; ++r)
      for (int j = 0; j < sys.J_max(); ++j) {
        const int kr = static_cast<int>(std::ceil(std::pow(2.0, j / 2.0) - 1e-12));
        for (int k1 = -kr; k1 <= kr; ++k1)
          for (int k2 = -kr; k2 <= kr; ++k2) {
            if (d == 2 && k2 != 0) continue;
            std::size_t c = 1;
            for (int a = 0; a < d; ++a)
              c *= points(a == r ? std::pow(2.0, -j) * s.c1 : std::pow(2.0, -j / 2.0) * s.c2);
            expected += c;
            ++bands;
          }
      }
    CHECK(sys.bands().size() == bands);
    CHECK(sys.coefficient_count() == expected);
    const auto idx = enumerate_indices(sys);
    CHECK(idx.size() == expected);
  }
}

TEST_CASE("enumeration order and index round trip") {
  SystemSpec s;
  s.extent = 32;
  const ShearletSystem a(s), b(s);
  const auto ia = enumerate_indices(a), ib = enumerate_indices(b);
  REQUIRE(ia.size() == ib.size());
  CHECK(ia == ib);
  // Scaling first, then regions ascending; j and k lexicographic inside.
  CHECK(ia.front().region == 0);
  CHECK(ia.front().j == 0);
  for (std::size_t i = 1; i < ia.size(); ++i) {
    const auto& p = ia[i - 1];
    const auto& q = ia[i];
    const auto kp = std::make_tuple(p.region, p.j, p.k[0], p.k[1], p.m[0], p.m[1], p.m[2]);
    const auto kq = std::make_tuple(q.region, q.j, q.k[0], q.k[1], q.m[0], q.m[1], q.m[2]);
    CHECK(kp < kq);
  }
  for (std::size_t i = 0; i < ia.size(); i += 97) {
    CHECK(a.index_of(i) == ia[i]);
    CHECK(a.flat_of(ia[i]) == i);
  }
  ShearletIndex bogus;
  bogus.region = 1;
  bogus.j = 99;
  CHECK_THROWS_AS(a.flat_of(bogus), ConsistencyError);
  CHECK_THROWS_AS(a.index_of(a.coefficient_count()), ConsistencyError);
}

TEST_CASE("frequency regions") {
  CHECK(frequency_region(2, {2, 0.5, 0}) == 1);
  CHECK(region_label(2, 1) == "C1");
  CHECK(frequency_region(2, {0.1, 3, 0}) == 2);
  CHECK(frequency_region(2, {-2, 1, 0}) == 3);
  CHECK(frequency_region(2, {0.5, -1, 0}) == 4);
  CHECK(frequency_region(2, {0.99, -0.99, 0}) == 0);
  CHECK(frequency_region(2, {-3, 3, 0}) == 3);  // seam goes to the horizontal pair
  CHECK(frequency_region(3, {0.5, 0.5, 0.5}) == 0);
  CHECK(region_label(3, frequency_region(3, {0, 0, -2})) == "P6");
  CHECK(frequency_region(3, {0.2, 1.5, -1.0}) == 2);
  CHECK(frequency_region(3, {2, 2, 2}) == 1);

  // Brute-force partition check against the defining inequalities.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int t = 0; t < 2000; ++t) {
    const Vec3 p{u(rng), u(rng), u(rng)};
    const int r = frequency_region(3, p);
    const double m = std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2])});
    if (m < 1) {
      CHECK(r == 0);
      continue;
    }
    const int axis = (r - 1) % 3;
    CHECK(std::abs(p[axis]) == m);
    CHECK((r <= 3) == (p[axis] > 0));
  }
}

TEST_CASE("config round trip and validation") {
  SystemSpec s;
  s.dim = 3;
  s.J_max = 4;
  s.c1 = 0.75;
  s.c2 = 0.3333333333333333;
  s.K = 30;
  s.L = 15;
  s.extent = 32;
  const SystemSpec r = SystemSpec::from_config(s.to_config());
  CHECK(r.to_config() == s.to_config());
  CHECK(r.c2 == s.c2);

  const SystemSpec c = SystemSpec::from_config("# classical\ngenerator = classical\n domain=128 \n");
  CHECK(c.kind == GeneratorKind::BandLimitedClassical);
  CHECK(c.extent == 128);
  CHECK_THROWS_AS(SystemSpec::from_config("bogus=1"), FormatError);
  CHECK_THROWS_AS(SystemSpec::from_config("dim=two"), FormatError);
  CHECK_THROWS_AS(SystemSpec::from_config("dim"), FormatError);

  SystemSpec bad;
  bad.c2 = 2.0;  // c2 > c1 is outside the compact 2D hypothesis
  CHECK_THROWS_AS(bad.validate(), ConstraintError);
  bad = SystemSpec{};
  bad.extent = 48;
  CHECK_THROWS_AS(bad.validate(), ConstraintError);
  bad = SystemSpec{};
  bad.c1 = 0.0;
  CHECK_THROWS_AS(ShearletSystem{bad}, ConstraintError);
}

TEST_CASE("digital scale layout") {
  // The default number of scales puts the finest band's generator argument
  // at the raster Nyquist frequency.
  for (std::size_t n : {32u, 64u, 256u}) {
    SystemSpec s;
    s.extent = n;
    const ShearletSystem sys(s);
    CHECK(sys.J_max() == static_cast<int>(std::log2(n)));
    CHECK(n * sys.spacing() == doctest::Approx(8.0));
    CHECK(std::ldexp(sys.nyquist(), 1 - sys.J_max()) == doctest::Approx(0.125));
    SystemSpec c = s;
    c.kind = GeneratorKind::BandLimitedClassical;
    const ShearletSystem csys(c);
    CHECK(csys.J_max() == static_cast<int>(std::log2(n)));
    CHECK(std::ldexp(csys.nyquist(), 1 - csys.J_max()) == doctest::Approx(0.25));
    CHECK(n * csys.spacing() == doctest::Approx(4.0));
  }
  // The weight law: prod(decimation) h^d / V.
  SystemSpec s;
  s.extent = 64;
  const ShearletSystem sys(s);
  for (const Band& b : sys.bands()) {
    const double dec = double(b.decimation[0] * b.decimation[1]);
    CHECK(b.weight * b.weight == doctest::Approx(dec * sys.spacing() * sys.spacing() / b.volume));
    CHECK(b.lattice[0] * b.decimation[0] == 64);
  }
}
