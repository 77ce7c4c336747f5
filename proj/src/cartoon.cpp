// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/cartoon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "shearlab/errors.hpp"

namespace shearlab {

namespace {

constexpr double kPi = std::numbers::pi;

// sup over s of 6 s (1 - s^2)^2, attained at s^2 = 1/5.
const double kFirstDerivMax = 96.0 / (25.0 * std::sqrt(5.0));

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// cos(n t), sin(n t) for n = 1..N from cos t, sin t by the angle-addition
// recurrence.
template <class Fn>
void for_harmonics(double c, double s, int N, Fn&& fn) {
  double cn = c, sn = s;
  for (int n = 1; n <= N; ++n) {
    fn(n, cn, sn);
    const double cn1 = cn * c - sn * s;
    sn = sn * c + cn * s;
    cn = cn1;
  }
}

int max_degree(const RadiusFunction& r) {
  int N = 0;
  for (const auto& h : r.harmonics) N = std::max(N, h.n);
  return N;
}

// rho at the direction (c, s) = (cos t, sin t) without calling atan2.
double rho_at(const RadiusFunction& r, double base, double c, double s) {
  if (r.harmonics.empty()) return base;
  const int N = max_degree(r);
  double cs[16], sn[16];
  for_harmonics(c, s, N, [&](int n, double cn, double snn) { cs[n] = cn, sn[n] = snn; });
  double v = base;
  for (const auto& h : r.harmonics) v += h.a * cs[h.n] + h.b * sn[h.n];
  return v;
}

std::vector<std::array<int, 3>> sphere_monomials() {
  std::vector<std::array<int, 3>> m;
  for (int d = 2; d <= 3; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) m.push_back({a, b, d - a - b});
  return m;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// RadiusFunction

double RadiusFunction::base() const {
  double s = 0.0;
  for (const auto& h : harmonics) s += std::abs(h.a) + std::abs(h.b);
  return rho0 - s;
}

double RadiusFunction::operator()(double theta) const {
  double v = base();
  for (const auto& h : harmonics) v += h.a * std::cos(h.n * theta) + h.b * std::sin(h.n * theta);
  return v;
}

double RadiusFunction::derivative(double theta) const {
  double v = 0.0;
  for (const auto& h : harmonics) v += h.n * (h.b * std::cos(h.n * theta) - h.a * std::sin(h.n * theta));
  return v;
}

double RadiusFunction::second_derivative(double theta) const {
  double v = 0.0;
  for (const auto& h : harmonics)
    v -= double(h.n) * h.n * (h.a * std::cos(h.n * theta) + h.b * std::sin(h.n * theta));
  return v;
}

double RadiusFunction::curvature_bound(int grid) const {
  double m = 0.0, third = 0.0;
  for (int k = 0; k < grid; ++k) m = std::max(m, std::abs(second_derivative(2.0 * kPi * k / grid)));
  for (const auto& h : harmonics) third += std::pow(h.n, 3) * (std::abs(h.a) + std::abs(h.b));
  return m + kPi / grid * third;
}

// ---------------------------------------------------------------------------
// Bump

double Bump::operator()(const Point3& x, int dim) const {
  double t = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double u = (x[a] - center[a]) / radius;
    t += u * u;
  }
  if (t >= 1.0) return 0.0;
  const double w = 1.0 - t;
  return amplitude * w * w * w;
}

double Bump::c2_norm(int dim) const {
  // Profile g(u) = (1 - |u|^2)^3: sup|g| = 1, sup|d_a g| = 96 / (25 sqrt 5),
  // sup|d_aa g| = 6 (at the center), sup|d_ab g| = 3 (at u_a = u_b = 1/2).
  const double mixed = dim * (dim - 1) / 2;
  return std::abs(amplitude) *
         (1.0 + dim * kFirstDerivMax / radius + (6.0 * dim + 3.0 * mixed) / (radius * radius));
}

// ---------------------------------------------------------------------------
// SurfaceSpec

double SurfaceSpec::radius(const Point3& u) const {
  double p = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    p += coeffs[i] * ipow(u[0], monomials[i][0]) * ipow(u[1], monomials[i][1]) * ipow(u[2], monomials[i][2]);
  return r0 * (1.0 + eps * p);
}

bool SurfaceSpec::inside(const Point3& o) const {
  if (kind == SurfaceKind::Sphere) {
    const double r = std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]);
    if (r == 0.0) return true;
    return r <= radius({o[0] / r, o[1] / r, o[2] / r});
  }
  const double shift = R - half_width;
  for (int i = 0; i < patches; ++i) {
    Point3 c{0, 0, 0};
    c[static_cast<std::size_t>(i / 2)] = i % 2 ? shift : -shift;  // face at +-half_width
    const double dx = o[0] - c[0], dy = o[1] - c[1], dz = o[2] - c[2];
    if (dx * dx + dy * dy + dz * dz > R * R) return false;
  }
  return true;
}

double SurfaceSpec::max_extent() const {
  if (kind == SurfaceKind::Sphere) return r0 * (1.0 + eps);
  // Inside both x-balls the transverse offset is at most sqrt(2 R w - w^2).
  return std::max(half_width, std::sqrt(2.0 * R * half_width - half_width * half_width));
}

double SurfaceSpec::max_principal_curvature(int grid) const {
  if (kind == SurfaceKind::RoundedCube) return 1.0 / R;
  auto F = [&](double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    return r - radius({x / r, y / r, z / r});
  };
  const double d = 1e-4 * r0;
  double worst = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int k = 0; k < 2 * grid; ++k) {
      const double th = kPi * (i + 0.5) / grid, ph = kPi * k / grid;
      const Point3 u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      const double r = radius(u);
      const double p[3] = {r * u[0], r * u[1], r * u[2]};
      auto at = [&](int a, double da, int b, double db) {
        double q[3] = {p[0], p[1], p[2]};
        q[a] += da;
        q[b] += db;
        return F(q[0], q[1], q[2]);
      };
      double g[3], H[3][3];
      const double f0 = F(p[0], p[1], p[2]);
      for (int a = 0; a < 3; ++a) {
        g[a] = (at(a, d, a, 0) - at(a, -d, a, 0)) / (2 * d);
        H[a][a] = (at(a, d, a, 0) - 2 * f0 + at(a, -d, a, 0)) / (d * d);
        for (int b = a + 1; b < 3; ++b)
          H[a][b] = H[b][a] = (at(a, d, b, d) - at(a, d, b, -d) - at(a, -d, b, d) + at(a, -d, b, -d)) / (4 * d * d);
      }
      const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
      const double n[3] = {g[0] / gn, g[1] / gn, g[2] / gn};
      // Tangent basis: t1 from the axis least aligned with n, t2 = n x t1.
      int ax = 0;
      for (int a = 1; a < 3; ++a)
        if (std::abs(n[a]) < std::abs(n[ax])) ax = a;
      double t1[3] = {0, 0, 0};
      t1[ax] = 1.0;
      const double dot = n[ax];
      for (int a = 0; a < 3; ++a) t1[a] -= dot * n[a];
      const double t1n = std::sqrt(t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]);
      for (double& v : t1) v /= t1n;
      const double t2[3] = {n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0]};
      auto form = [&](const double* a, const double* b) {
        double s = 0.0;
        for (int x = 0; x < 3; ++x)
          for (int y = 0; y < 3; ++y) s += a[x] * H[x][y] * b[y];
        return s / gn;
      };
      const double m11 = form(t1, t1), m22 = form(t2, t2), m12 = form(t1, t2);
      const double mean = 0.5 * (m11 + m22);
      const double rad = std::sqrt(0.25 * (m11 - m22) * (m11 - m22) + m12 * m12);
      worst = std::max({worst, std::abs(mean + rad), std::abs(mean - rad)});
    }
  return worst;
}

// ---------------------------------------------------------------------------
// CartoonSpec

bool CartoonSpec::inside(const Point3& x) const {
  const Point3 o{x[0] - center[0], x[1] - center[1], dim == 3 ? x[2] - center[2] : 0.0};
  if (dim == 3) return surface.inside(o);
  const double r = std::hypot(o[0], o[1]);
  if (r == 0.0) return true;
  return r <= rho_at(boundary, boundary.base(), o[0] / r, o[1] / r);
}

double CartoonSpec::value(const Point3& x) const {
  const double v = f0(x, dim);
  return inside(x) ? v + f1(x, dim) : v;
}

void CartoonSpec::validate() const {
  if (dim != 2 && dim != 3) throw ConstraintError("cartoon dimension must be 2 or 3");
  if (!(nu > 0.0)) throw ConstraintError("curvature bound nu must be positive");
  if (pieces < 1) throw ConstraintError("piece count must be at least 1");

  double extent;
  if (dim == 2) {
    // rho'' by central differences of rho itself, not the analytic formula.
    const int G = 4096;
    const double dt = 2.0 * kPi / G, fd = 1e-3;
    double rmin = INFINITY, rmax = 0.0, curv = 0.0;
    for (int k = 0; k < G; ++k) {
      const double t = k * dt;
      const double r = boundary(t);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      curv = std::max(curv, std::abs(boundary(t + fd) - 2 * r + boundary(t - fd)) / (fd * fd));
    }
    if (!(rmin > 0.0)) throw ConstraintError("boundary radius must stay positive");
    if (rmax > boundary.rho0 + 1e-12) throw ConstraintError("boundary radius exceeds rho0");
    if (boundary.rho0 >= 1.0) throw ConstraintError("rho0 must be below 1");
    if (curv > nu) throw ConstraintError("boundary curvature bound violated: " + fmt(curv) + " > " + fmt(nu));
    extent = rmax;
  } else {
    const double k = surface.max_principal_curvature();
    if (k > nu) throw ConstraintError("surface curvature bound violated: " + fmt(k) + " > " + fmt(nu));
    if (surface.kind == SurfaceKind::RoundedCube && surface.patches > pieces)
      throw ConstraintError("rounded cube has more patches than allowed pieces");
    extent = surface.max_extent();
  }
  for (int a = 0; a < dim; ++a)
    if (center[a] - extent <= 0.0 || center[a] + extent >= 1.0)
      throw ConstraintError("discontinuity set does not fit inside the unit cube");

  // C2 norms from finite differences on a grid over the support, compared
  // with the unit bound (grid suprema never exceed the true ones).
  for (const Bump* b : {&f0, &f1}) {
    for (int a = 0; a < dim; ++a)
      if (b->center[a] - b->radius < -1e-12 || b->center[a] + b->radius > 1.0 + 1e-12)
        throw ConstraintError("bump support leaves the unit cube");
    const int G = dim == 2 ? 121 : 41;
    const double h = 1e-4 * b->radius;
    std::vector<double> sup(10, 0.0);  // value, 3 first, 6 second derivatives
    for (int i = 0; i < G; ++i)
      for (int j = 0; j < G; ++j)
        for (int l = 0; l < (dim == 3 ? G : 1); ++l) {
          Point3 x{b->center[0] + b->radius * (2.0 * i / (G - 1) - 1),
                   b->center[1] + b->radius * (2.0 * j / (G - 1) - 1),
                   dim == 3 ? b->center[2] + b->radius * (2.0 * l / (G - 1) - 1) : 0.0};
          auto at = [&](int a, double da, int c, double dc) {
            Point3 y = x;
            y[static_cast<std::size_t>(a)] += da;
            y[static_cast<std::size_t>(c)] += dc;
            return (*b)(y, dim);
          };
          const double v = (*b)(x, dim);
          sup[0] = std::max(sup[0], std::abs(v));
          int slot = 4;
          for (int a = 0; a < dim; ++a) {
            sup[1 + a] = std::max(sup[1 + a], std::abs(at(a, h, a, 0) - at(a, -h, a, 0)) / (2 * h));
            for (int c = a; c < dim; ++c, ++slot) {
              const double d2 = a == c ? (at(a, h, a, 0) - 2 * v + at(a, -h, a, 0)) / (h * h)
                                       : (at(a, h, c, h) - at(a, h, c, -h) - at(a, -h, c, h) + at(a, -h, c, -h)) /
                                             (4 * h * h);
              sup[static_cast<std::size_t>(slot)] = std::max(sup[static_cast<std::size_t>(slot)], std::abs(d2));
            }
          }
        }
    double norm = 0.0;
    for (double s : sup) norm += s;
    if (norm > 1.0 + 1e-6) throw ConstraintError("bump C2 norm exceeds 1: " + fmt(norm));
  }
}

std::string CartoonSpec::to_text() const {
  std::ostringstream os;
  os << "dim=" << dim << "\nnu=" << fmt(nu) << "\nseed=" << seed << "\npieces=" << pieces << "\ncenter="
     << fmt(center[0]) << ' ' << fmt(center[1]) << ' ' << fmt(center[2]) << '\n';
  for (const auto& [name, b] : {std::pair{"f0", &f0}, std::pair{"f1", &f1}})
    os << name << '=' << fmt(b->center[0]) << ' ' << fmt(b->center[1]) << ' ' << fmt(b->center[2]) << ' '
       << fmt(b->radius) << ' ' << fmt(b->amplitude) << '\n';
  if (dim == 2) {
    os << "rho0=" << fmt(boundary.rho0) << '\n';
    for (const auto& h : boundary.harmonics) os << "harmonic=" << h.n << ' ' << fmt(h.a) << ' ' << fmt(h.b) << '\n';
  } else {
    os << "surface=" << (surface.kind == SurfaceKind::Sphere ? "sphere" : "rounded_cube") << '\n';
    if (surface.kind == SurfaceKind::Sphere) {
      os << "r0=" << fmt(surface.r0) << "\neps=" << fmt(surface.eps) << '\n';
      for (std::size_t i = 0; i < surface.coeffs.size(); ++i)
        os << "monomial=" << surface.monomials[i][0] << ' ' << surface.monomials[i][1] << ' '
           << surface.monomials[i][2] << ' ' << fmt(surface.coeffs[i]) << '\n';
    } else {
      os << "R=" << fmt(surface.R) << "\nhalf_width=" << fmt(surface.half_width) << "\npatches=" << surface.patches
         << '\n';
    }
  }
  return os.str();
}

CartoonSpec CartoonSpec::from_text(const std::string& text) {
  CartoonSpec s;
  s.surface.monomials.clear();
  s.surface.coeffs.clear();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("cartoon spec line " + std::to_string(lineno) + ": missing '='");
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream v(line.substr(eq + 1));
    auto fail = [&] { throw FormatError("cartoon spec line " + std::to_string(lineno) + ": bad value for " + key); };
    auto read = [&](auto&... xs) {
      ((v >> xs) && ...);
      if (!v) fail();
    };
    if (key == "dim") read(s.dim);
    else if (key == "nu") read(s.nu);
    else if (key == "seed") read(s.seed);
    else if (key == "pieces") read(s.pieces);
    else if (key == "center") read(s.center[0], s.center[1], s.center[2]);
    else if (key == "f0") read(s.f0.center[0], s.f0.center[1], s.f0.center[2], s.f0.radius, s.f0.amplitude);
    else if (key == "f1") read(s.f1.center[0], s.f1.center[1], s.f1.center[2], s.f1.radius, s.f1.amplitude);
    else if (key == "rho0") read(s.boundary.rho0);
    else if (key == "harmonic") {
      Harmonic h;
      read(h.n, h.a, h.b);
      if (h.n < 1 || h.n > 15) fail();
      s.boundary.harmonics.push_back(h);
    } else if (key == "surface") {
      std::string k;
      read(k);
      if (k == "sphere") s.surface.kind = SurfaceKind::Sphere;
      else if (k == "rounded_cube") s.surface.kind = SurfaceKind::RoundedCube;
      else fail();
    } else if (key == "r0") read(s.surface.r0);
    else if (key == "eps") read(s.surface.eps);
    else if (key == "monomial") {
      std::array<int, 3> m{};
      double c;
      read(m[0], m[1], m[2], c);
      s.surface.monomials.push_back(m);
      s.surface.coeffs.push_back(c);
    } else if (key == "R") read(s.surface.R);
    else if (key == "half_width") read(s.surface.half_width);
    else if (key == "patches") read(s.surface.patches);
    else throw FormatError("cartoon spec line " + std::to_string(lineno) + ": unknown key " + key);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Generators

RadiusFunction random_star_set(double nu, std::uint64_t seed) {
  if (!(nu > 0.0)) throw ConstraintError("curvature bound nu must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RadiusFunction r;
  for (int n = 1; n <= 6; ++n) {
    const double a = g(rng) / (n * n), b = g(rng) / (n * n);
    r.harmonics.push_back({n, a, b});
  }
  // Both constraints are linear in a common scale factor.
  double l1 = 0.0;
  for (const auto& h : r.harmonics) l1 += std::abs(h.a) + std::abs(h.b);
  const double bound = r.curvature_bound();
  const double scale = std::min(0.9 * nu / bound, 0.375 * r.rho0 / l1);  // keeps rho >= rho0 / 4
  for (auto& h : r.harmonics) h.a *= scale, h.b *= scale;
  return r;
}

namespace {

Bump unit_c2_bump(const Point3& center, double radius, int dim) {
  Bump b{center, radius, 1.0};
  b.amplitude = 1.0 / b.c2_norm(dim);
  return b;
}

Bump random_bump(std::mt19937_64& rng, int dim, double rmin, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rmin + (rmax - rmin) * u(rng);
  Point3 c{0.5, 0.5, 0.5};
  for (int a = 0; a < dim; ++a) c[static_cast<std::size_t>(a)] = r + (1.0 - 2.0 * r) * u(rng);
  return unit_c2_bump(c, r, dim);
}

}  // namespace

CartoonSpec random_cartoon_2d(double nu, std::uint64_t seed) {
  CartoonSpec s;
  s.dim = 2;
  s.nu = nu;
  s.seed = seed;
  s.center = {0.5, 0.5, 0.0};
  s.boundary = random_star_set(nu, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  s.f0 = random_bump(rng, 2, 0.2, 0.4);
  s.f0.center[2] = 0.0;
  s.f1 = unit_c2_bump({0.5, 0.5, 0.0}, 0.5, 2);
  return s;
}

CartoonSpec surface_cartoon_3d(double nu, int pieces, std::uint64_t seed) {
  if (!(nu > 0.0)) throw ConstraintError("curvature bound nu must be positive");
  if (pieces < 1) throw ConstraintError("piece count must be at least 1");
  CartoonSpec s;
  s.dim = 3;
  s.nu = nu;
  s.seed = seed;
  s.pieces = pieces;
  std::mt19937_64 rng(seed);
  if (pieces == 1) {
    SurfaceSpec& f = s.surface;
    f.kind = SurfaceKind::Sphere;
    if (1.0 / (0.9 * nu) > 0.4) throw ConstraintError("nu too small for a closed surface inside the unit cube");
    f.r0 = std::clamp(2.0 / (0.9 * nu), 0.3, 0.4);
    f.monomials = sphere_monomials();
    std::normal_distribution<double> g;
    double l1 = 0.0;
    for (std::size_t i = 0; i < f.monomials.size(); ++i) {
      f.coeffs.push_back(g(rng));
      l1 += std::abs(f.coeffs.back());
    }
    for (double& c : f.coeffs) c /= l1;
    // Largest perturbation whose coarse-grid curvature stays 5% under 0.9 nu;
    // validate() re-checks on a finer grid against nu.
    double lo = 0.0, hi = std::min(0.3, 0.45 / f.r0 - 1.0);
    f.eps = hi;
    if (f.max_principal_curvature(48) > 0.855 * nu) {
      for (int it = 0; it < 30; ++it) {
        f.eps = 0.5 * (lo + hi);
        (f.max_principal_curvature(48) <= 0.855 * nu ? lo : hi) = f.eps;
      }
      f.eps = lo;
    }
  } else {
    SurfaceSpec& f = s.surface;
    f.kind = SurfaceKind::RoundedCube;
    f.half_width = 0.25;
    f.R = std::max(1.0 / (0.9 * nu), 2.0 * f.half_width);
    if (f.R > 0.6) throw ConstraintError("nu too small for a rounded cube inside the unit cube");
    f.patches = std::min(pieces, 6);
  }
  s.f0 = random_bump(rng, 3, 0.25, 0.45);
  s.f1 = unit_c2_bump({0.5, 0.5, 0.5}, 0.5, 3);
  return s;
}

// ---------------------------------------------------------------------------
// Rasterization

Raster rasterize_cartoon(const CartoonSpec& spec, std::size_t n) {
  if (n < 8 || (n & (n - 1)) != 0) throw ShapeError("raster extent must be a power of two >= 8");
  Raster r(spec.dim, n);
  const std::size_t plane = spec.dim == 3 ? n * n : n;
  const int S = 4, subs = spec.dim == 3 ? S * S * S : S * S;
  const double h = 1.0 / static_cast<double>(n);
  detail::parallel_items(n, num_threads(), [&](int, std::size_t i) {
    for (std::size_t rest = 0; rest < plane; ++rest) {
      const std::size_t j = spec.dim == 3 ? rest / n : rest, l = spec.dim == 3 ? rest % n : 0;
      const Point3 c{(i + 0.5) * h, (j + 0.5) * h, spec.dim == 3 ? (l + 0.5) * h : 0.0};
      int hits = 0;
      for (int s = 0; s < subs; ++s) {
        const Point3 x{(i + (s % S + 0.5) / S) * h, (j + (s / S % S + 0.5) / S) * h,
                       spec.dim == 3 ? (l + (s / (S * S) + 0.5) / S) * h : 0.0};
        hits += spec.inside(x);
      }
      r.data[i * plane + rest] = spec.f0(c, spec.dim) + spec.f1(c, spec.dim) * hits / subs;
    }
  });
  return r;
}

double raster_l2_error(const CartoonSpec& spec, const Raster& r, int sub) {
  if (sub < 1) throw ConstraintError("need at least one quadrature point per pixel axis");
  const std::size_t n = r.extents[0];
  const std::size_t plane = spec.dim == 3 ? n * n : n;
  const double h = 1.0 / static_cast<double>(n);
  const int subs = spec.dim == 3 ? sub * sub * sub : sub * sub;
  std::vector<double> rows(n, 0.0);
  detail::parallel_items(n, num_threads(), [&](int, std::size_t i) {
    double acc = 0.0;
    for (std::size_t rest = 0; rest < plane; ++rest) {
      const std::size_t j = spec.dim == 3 ? rest / n : rest, l = spec.dim == 3 ? rest % n : 0;
      const double v = r.data[i * plane + rest];
      for (int s = 0; s < subs; ++s) {
        const Point3 x{(i + (s % sub + 0.5) / sub) * h, (j + (s / sub % sub + 0.5) / sub) * h,
                       spec.dim == 3 ? (l + (s / (sub * sub) + 0.5) / sub) * h : 0.0};
        const double d = v - spec.value(x);
        acc += d * d;
      }
    }
    rows[i] = acc;
  });
  double total = 0.0;
  for (double v : rows) total += v;
  return total * std::pow(h, spec.dim) / subs;
}

}  // namespace shearlab
