// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/filters.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "shearlab/errors.hpp"

namespace shearlab {

namespace {

constexpr double kPi = std::numbers::pi;
using lcplx = std::complex<long double>;

// Horner evaluation of sum_n h[n] w^n with w = exp(-2 pi i xi).
cplx eval_taps(const std::vector<double>& h, double xi) {
  const cplx w = std::polar(1.0, -2.0 * kPi * xi);
  cplx acc = 0.0;
  for (auto it = h.rbegin(); it != h.rend(); ++it) acc = acc * w + *it;
  return acc;
}

std::vector<long double> binomial_series(int K, int L) {
  std::vector<long double> c(static_cast<std::size_t>(L));
  c[0] = 1.0L;
  for (int n = 1; n < L; ++n) c[n] = c[n - 1] * static_cast<long double>(K - 1 + n) / n;
  return c;
}

lcplx poly_eval(const std::vector<long double>& c, lcplx y, lcplx* derivative) {
  lcplx p = 0.0L, dp = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = dp * y + p;
    p = p * y + *it;
  }
  if (derivative) *derivative = dp;
  return p;
}

}  // namespace

cplx FilterPair::m0(double xi) const { return eval_taps(h0, xi); }
cplx FilterPair::m1(double xi) const { return eval_taps(h1, xi); }

void validate_orders(int K, int L, bool relaxed) {
  if (K < 1 || L < 1) throw ConstraintError("filter orders must satisfy K, L >= 1");
  if (relaxed) return;
  if (L < 10 || 2 * K < 3 * L || K > 3 * L - 2) {
    std::ostringstream msg;
    msg << "filter orders (K=" << K << ", L=" << L
        << ") violate L >= 10 and 3L/2 <= K <= 3L-2";
    throw ConstraintError(msg.str());
  }
}

double squared_lowpass_magnitude(int K, int L, double xi, bool relaxed) {
  validate_orders(K, L, relaxed);
  const long double arg = std::numbers::pi_v<long double> * static_cast<long double>(xi);
  const long double s = std::sin(arg);
  const long double c = std::cos(arg);
  const long double y = s * s;
  const auto coeff = binomial_series(K, L);
  long double acc = 0.0L;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * y + *it;
  return static_cast<double>(std::pow(c * c, static_cast<long double>(K)) * acc);
}

FilterPair spectral_factorize(int K, int L, bool relaxed) {
  validate_orders(K, L, relaxed);
  const auto coeff = binomial_series(K, L);
  const int deg = L - 1;

  // Roots of P(y) = sum_n C(K-1+n, n) y^n.
  std::vector<lcplx> yroots;
  if (deg > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i)
      companion(i, deg - 1) = -static_cast<double>(coeff[i] / coeff[deg]);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
      throw FactorizationError("companion eigensolve failed", std::numeric_limits<double>::infinity());
    const auto ev = solver.eigenvalues();
    for (int i = 0; i < deg; ++i) yroots.emplace_back(ev[i].real(), ev[i].imag());
    // The companion eigenvalues are only a few digits accurate for large K.
    // Aberth iterations in long double polish all roots simultaneously and,
    // unlike independent Newton steps, cannot collapse two seeds onto one root.
    for (int it = 0; it < 500; ++it) {
      long double moved = 0.0L;
      for (int i = 0; i < deg; ++i) {
        lcplx dp;
        const lcplx p = poly_eval(coeff, yroots[i], &dp);
        if (p == 0.0L) continue;
        const lcplx ratio = p / dp;
        lcplx repel = 0.0L;
        for (int k = 0; k < deg; ++k)
          if (k != i) repel += 1.0L / (yroots[i] - yroots[k]);
        const lcplx step = ratio / (1.0L - ratio * repel);
        yroots[i] -= step;
        moved = std::max(moved, std::abs(step) / std::max(1e-3L, std::abs(yroots[i])));
      }
      if (moved < 1e-17L) break;
    }
    double worst = 0.0;
    for (const lcplx& y : yroots) {
      // Residual relative to the size of the terms being summed.
      long double scale = 0.0L, ay = std::abs(y), pw = 1.0L;
      for (long double cn : coeff) {
        scale += cn * pw;
        pw *= ay;
      }
      worst = std::max(worst, static_cast<double>(std::abs(poly_eval(coeff, y, nullptr)) / scale));
    }
    if (worst > 1e-12) throw FactorizationError("root polishing did not converge", worst);
  }

  // Each y-root gives a reciprocal pair of w-roots; keep the one outside the
  // unit circle so that the z-polynomial has its zeros inside.
  std::vector<lcplx> poly{1.0L};
  auto multiply = [&](lcplx a0, lcplx a1) {  // poly *= (a0 + a1 w)
    std::vector<lcplx> out(poly.size() + 1, 0.0L);
    for (std::size_t n = 0; n < poly.size(); ++n) {
      out[n] += poly[n] * a0;
      out[n + 1] += poly[n] * a1;
    }
    poly.swap(out);
  };
  for (const lcplx& y : yroots) {
    const lcplx b = 2.0L - 4.0L * y;
    const lcplx disc = std::sqrt(b * b - 4.0L);
    lcplx rho = (b + disc) / 2.0L;
    if (std::abs(rho) < 1.0L) rho = 1.0L / rho;
    multiply(-rho / (1.0L - rho), 1.0L / (1.0L - rho));
  }
  for (int i = 0; i < K; ++i) multiply(0.5L, 0.5L);

  FilterPair pair;
  pair.K = K;
  pair.L = L;
  pair.h0.resize(poly.size());
  long double imag_max = 0.0L;
  for (std::size_t n = 0; n < poly.size(); ++n) {
    pair.h0[n] = static_cast<double>(poly[n].real());
    imag_max = std::max(imag_max, std::abs(poly[n].imag()));
  }
  if (imag_max > 1e-10L)
    throw FactorizationError("factor has non-real taps", static_cast<double>(imag_max));
  pair.h1.resize(pair.h0.size());
  for (std::size_t n = 0; n < pair.h0.size(); ++n) pair.h1[n] = (n % 2 ? -1.0 : 1.0) * pair.h0[n];

  const double residual = factorization_residual(pair);
  if (residual > 1e-8) throw FactorizationError("|H0|^2 does not match the closed form", residual);
  return pair;
}

double factorization_residual(const FilterPair& pair, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double xi = static_cast<double>(i) / points - 0.5;
    const double got = std::norm(pair.m0(xi));
    worst = std::max(worst, std::abs(got - squared_lowpass_magnitude(pair.K, pair.L, xi, true)));
  }
  return worst;
}

cplx scaling_spectrum(const FilterPair& pair, double xi, int J_trunc) {
  if (J_trunc < 1) throw ConstraintError("J_trunc must be >= 1");
  cplx acc = 1.0;
  double x = xi;
  for (int j = 0; j < J_trunc; ++j, x *= 0.5) acc *= pair.m0(x);
  // The omitted factors equal exp(-2 pi i mu 2^-j xi) up to O(8^-j xi^3),
  // because |m0| = 1 + O(xi^{2K}) near the origin and mu = sum n h0[n] is the
  // group delay there. Applying their product keeps the phase exact.
  double mu = 0.0;
  for (std::size_t n = 0; n < pair.h0.size(); ++n) mu += static_cast<double>(n) * pair.h0[n];
  return acc * std::polar(1.0, -2.0 * kPi * mu * std::ldexp(xi, 1 - J_trunc));
}

double scaling_magnitude(int K, int L, double xi, int J_trunc) {
  double acc = 1.0;
  double x = xi;
  for (int j = 0; j < J_trunc && acc > 0.0; ++j, x *= 0.5)
    acc *= std::sqrt(squared_lowpass_magnitude(K, L, x, true));
  return acc;
}

// ---------------------------------------------------------------------------
// ScalingTable

ScalingTable::ScalingTable(std::shared_ptr<const FilterPair> pair, int J_trunc, double half_width,
                           int steps_per_unit)
    : pair_(std::move(pair)), J_trunc_(J_trunc), half_width_(half_width),
      step_(1.0 / steps_per_unit) {
  double mu = 0.0;
  for (std::size_t n = 0; n < pair_->h0.size(); ++n) mu += static_cast<double>(n) * pair_->h0[n];
  delay_ = 2.0 * mu;
  // Three guard nodes on each side keep the stencil inside the table.
  const auto count = static_cast<std::size_t>(std::llround(2.0 * half_width_ / step_)) + 7;
  table_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = -half_width_ + (static_cast<double>(i) - 3.0) * step_;
    table_[i] = scaling_spectrum(*pair_, x, J_trunc_) * std::polar(1.0, 2.0 * kPi * delay_ * x);
  }
}

cplx ScalingTable::operator()(double x) const {
  if (std::abs(x) > half_width_) return pair_->m0(x) * (*this)(0.5 * x);
  const double t = (x + half_width_) / step_ + 3.0;
  const auto i0 = static_cast<std::ptrdiff_t>(std::floor(t)) - 2;
  const double u = t - static_cast<double>(i0);  // in [2, 3)
  static constexpr double denom[6] = {-120.0, 24.0, -12.0, 12.0, -24.0, 120.0};
  double d[6];
  for (int m = 0; m < 6; ++m) d[m] = u - m;
  cplx acc = 0.0;
  for (int m = 0; m < 6; ++m) {
    double w = 1.0 / denom[m];
    for (int n = 0; n < 6; ++n)
      if (n != m) w *= d[n];
    acc += w * table_[static_cast<std::size_t>(i0 + m)];
  }
  return acc * std::polar(1.0, -2.0 * kPi * delay_ * x);
}

// ---------------------------------------------------------------------------
// Generators

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::CompactSeparable: return "compact";
    case GeneratorKind::BandLimitedClassical: return "classical";
    case GeneratorKind::Zero: return "zero";
  }
  return "unknown";
}

cplx compact_along(const FilterPair& pair, double t, int J_trunc) {
  return pair.m1(4.0 * t) * scaling_spectrum(pair, t, J_trunc);
}

cplx compact_across(const FilterPair& pair, double t, int J_trunc) {
  return scaling_spectrum(pair, 2.0 * t, J_trunc);
}

namespace {

Generator compact_psi(std::shared_ptr<const FilterPair> pair, int dim, int long_axis) {
  Generator g;
  g.dim = dim;
  g.kind = GeneratorKind::CompactSeparable;
  g.long_axis = long_axis;
  g.filters = pair;
  g.spectrum = [pair, dim, long_axis](const Vec3& xi) {
    cplx v = compact_along(*pair, xi[long_axis]);
    for (int b = 0; b < dim; ++b)
      if (b != long_axis) v *= compact_across(*pair, xi[b]);
    return v;
  };
  g.magnitude = [pair, dim, long_axis](const Vec3& xi) {
    const int K = pair->K, L = pair->L;
    const double t = xi[long_axis];
    double v = std::sqrt(squared_lowpass_magnitude(K, L, 4.0 * t + 0.5, true)) *
               scaling_magnitude(K, L, t);
    for (int b = 0; b < dim; ++b)
      if (b != long_axis) v *= scaling_magnitude(K, L, 2.0 * xi[b]);
    return v;
  };
  const double taps = static_cast<double>(pair->h0.size() - 1);
  SupportBox box;
  for (int b = 0; b < dim; ++b) box.hi[b] = (b == long_axis ? 6.0 : 4.0) * taps;
  g.support_hint = box;
  return g;
}

}  // namespace

Generator compact_scaling(std::shared_ptr<const FilterPair> pair, int dim) {
  Generator g;
  g.dim = dim;
  g.kind = GeneratorKind::CompactSeparable;
  g.filters = pair;
  g.spectrum = [pair, dim](const Vec3& xi) {
    cplx v = 1.0;
    for (int b = 0; b < dim; ++b) v *= scaling_spectrum(*pair, xi[b]);
    return v;
  };
  SupportBox box;
  for (int b = 0; b < dim; ++b) box.hi[b] = 2.0 * static_cast<double>(pair->h0.size() - 1);
  g.support_hint = box;
  g.decay = {1.0, std::numeric_limits<double>::infinity(), 0.0, false};
  return g;
}

Generator compact_shearlet_2d(std::shared_ptr<const FilterPair> pair) {
  Generator g = compact_psi(pair, 2, 0);
  g.decay = fit_decay(g);
  g.decay.sparsity_grade = g.decay.alpha > 5.0 && g.decay.gamma >= 4.0;
  return g;
}

std::array<Generator, 3> compact_shearlets_3d(std::shared_ptr<const FilterPair> pair) {
  std::array<Generator, 3> out{compact_psi(pair, 3, 0), compact_psi(pair, 3, 1),
                               compact_psi(pair, 3, 2)};
  // The three generators are coordinate permutations of each other, so one
  // fit serves all of them.
  DecayParams d = fit_decay(out[0]);
  d.sparsity_grade = d.alpha > 8.0 && d.gamma >= 4.0;
  for (auto& g : out) g.decay = d;
  return out;
}

double meyer_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t2 = t * t;
  return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}

double classical_lowpass(double s) {
  constexpr double a = 0.125;
  const double r = std::abs(s);
  if (r <= a) return 1.0;
  if (r >= 2.0 * a) return 0.0;
  return std::cos(0.5 * kPi * meyer_ramp((r - a) / a));
}

double classical_psi1(double s) {
  const double hi = classical_lowpass(0.5 * s);
  const double lo = classical_lowpass(s);
  return std::sqrt(std::max(0.0, hi * hi - lo * lo));
}

double classical_psi2(double t) {
  const double r = std::abs(t);
  if (r >= 1.0) return 0.0;
  return std::cos(0.5 * kPi * meyer_ramp(r));
}

namespace {

Generator classical_psi(int long_axis) {
  Generator g;
  g.dim = 2;
  g.kind = GeneratorKind::BandLimitedClassical;
  g.long_axis = long_axis;
  g.nyquist_argument = 0.25;
  g.spectrum = [long_axis](const Vec3& xi) {
    const double a = xi[long_axis];
    const double b = xi[1 - long_axis];
    if (a == 0.0) return cplx(0.0);
    return cplx(classical_psi1(a) * classical_psi2(b / a));
  };
  const double inf = std::numeric_limits<double>::infinity();
  g.decay = {1.0, inf, inf, true};
  return g;
}

}  // namespace

std::pair<Generator, Generator> classical_bandlimited_2d() {
  Generator phi;
  phi.dim = 2;
  phi.kind = GeneratorKind::BandLimitedClassical;
  phi.nyquist_argument = 0.25;
  phi.spectrum = [](const Vec3& xi) {
    return cplx(classical_lowpass(std::max(std::abs(xi[0]), std::abs(xi[1]))));
  };
  const double inf = std::numeric_limits<double>::infinity();
  phi.decay = {1.0, inf, inf, true};
  return {phi, classical_psi(0)};
}

GeneratorSet make_compact_set(std::shared_ptr<const FilterPair> pair, int dim) {
  if (dim != 2 && dim != 3) throw ConstraintError("dimension must be 2 or 3");
  GeneratorSet set;
  set.dim = dim;
  set.kind = GeneratorKind::CompactSeparable;
  set.phi = compact_scaling(pair, dim);
  if (dim == 2) {
    Generator psi = compact_shearlet_2d(pair);
    Generator tilde = compact_psi(pair, 2, 1);
    tilde.decay = psi.decay;
    set.psi = {psi, tilde};
  } else {
    auto three = compact_shearlets_3d(pair);
    set.psi.assign(three.begin(), three.end());
  }
  return set;
}

GeneratorSet make_classical_set() {
  GeneratorSet set;
  set.dim = 2;
  set.kind = GeneratorKind::BandLimitedClassical;
  auto [phi, psi] = classical_bandlimited_2d();
  set.phi = phi;
  set.psi = {psi, classical_psi(1)};
  return set;
}

GeneratorSet make_zero_set(int dim) {
  GeneratorSet set;
  set.dim = dim;
  set.kind = GeneratorKind::Zero;
  set.phi.dim = dim;
  set.phi.spectrum = [](const Vec3&) { return cplx(0.0); };
  for (int a = 0; a < dim; ++a) {
    Generator g = set.phi;
    g.long_axis = a;
    set.psi.push_back(g);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Decay fitting

namespace {

// Least-squares slope of log(envelope) against log(t) for t = 2^s,
// s in [s0, s1]. The envelope is the running maximum from the right for a
// decaying tail and from the left for a growing onset.
double envelope_slope(const std::function<double(double)>& f, double s0, double s1, bool tail) {
  constexpr int n = 256;
  std::vector<double> ls(n), lv(n);
  for (int i = 0; i < n; ++i) {
    ls[i] = s0 + (s1 - s0) * i / (n - 1);
    lv[i] = std::max(f(std::exp2(ls[i])), 1e-300);
  }
  if (tail) {
    for (int i = n - 2; i >= 0; --i) lv[i] = std::max(lv[i], lv[i + 1]);
  } else {
    for (int i = 1; i < n; ++i) lv[i] = std::max(lv[i], lv[i - 1]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = ls[i] * std::numbers::ln2;
    const double y = std::log(lv[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DecayParams fit_decay(const Generator& g) {
  DecayParams d;
  if (g.kind != GeneratorKind::CompactSeparable || g.long_axis < 0) return d;
  const int a = g.long_axis;
  const int b = (a + 1) % g.dim;
  auto mag = [&](const Vec3& xi) { return g.magnitude ? g.magnitude(xi) : std::abs(g(xi)); };
  auto along = [&](double t, double across) {
    Vec3 xi{0, 0, 0};
    xi[a] = t;
    xi[b] = across;
    return mag(xi);
  };
  d.alpha = envelope_slope([&](double t) { return along(t, 0.0); }, -10.0, -6.0, false);
  const double g1 = -envelope_slope([&](double t) { return along(t, 0.0); }, 3.0, 7.0, true);
  const double g2 = -envelope_slope(
      [&](double t) {
        Vec3 xi{0, 0, 0};
        xi[a] = 0.125;
        xi[b] = t;
        return mag(xi);
      },
      3.0, 7.0, true);
  d.gamma = std::min(g1, g2);
  // Smallest C that makes the bound hold on a probe grid.
  double C = 0.0;
  for (int i = -40; i <= 40; ++i) {
    for (int k = -40; k <= 40; ++k) {
      const double x1 = std::copysign(std::exp2(i / 4.0), i % 2 ? 1.0 : -1.0);
      const double x2 = k == 0 ? 0.0 : std::copysign(std::exp2(k / 4.0 - 5.0), k);
      const double bound = std::min(1.0, std::pow(std::abs(x1), d.alpha)) *
                           std::min(1.0, std::pow(std::abs(x1), -d.gamma)) *
                           std::min(1.0, std::pow(std::abs(x2), -d.gamma));
      if (bound > 0.0) C = std::max(C, along(x1, x2) / bound);
    }
  }
  d.C = C;
  return d;
}

}  // namespace shearlab
