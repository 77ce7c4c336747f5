// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/framebounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "shearlab/errors.hpp"
#include "shearlab/transform.hpp"
#include "parallel.hpp"

namespace shearlab {

namespace {

// Terms below this size cannot move any reported quantity.
constexpr double kNegligible = 1e-20;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

// Per-thread accumulation over items with a fixed-order final reduction.
template <class Fn>
std::vector<double> accumulate_parallel(std::size_t items, std::size_t size, Fn&& fn) {
  const int threads = std::max(1, std::min<int>(num_threads(), static_cast<int>(std::max<std::size_t>(items, 1))));
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(threads), std::vector<double>(size, 0.0));
  detail::parallel_items(items, threads,
                         [&](int t, std::size_t i) { fn(i, acc[static_cast<std::size_t>(t)]); });
  for (int t = 1; t < threads; ++t)
    for (std::size_t i = 0; i < size; ++i) acc[0][i] += acc[static_cast<std::size_t>(t)][i];
  return std::move(acc[0]);
}

}  // namespace

std::vector<double> FrequencyGrid::axis() const {
  if (!(hi > 0.0) || !(lo > 0.0) || lo >= hi || per_octave < 1)
    throw ConstraintError("frequency grid needs 0 < lo < hi and per_octave >= 1");
  std::vector<double> pos;
  for (int o = static_cast<int>(std::floor(std::log2(lo)));; ++o) {
    const double base = std::ldexp(1.0, o);
    if (base >= hi) break;
    for (int i = 0; i < per_octave; ++i) {
      const double v = base * (1.0 + static_cast<double>(i) / per_octave);
      if (v < hi) pos.push_back(v);
    }
  }
  pos.push_back(hi);
  std::vector<double> out;
  out.reserve(2 * pos.size() + 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.push_back(0.0);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

std::string FrequencyGrid::describe() const {
  std::ostringstream os;
  os << "dyadic[" << lo << "," << hi << "] x" << per_octave << "/octave (" << points_per_axis()
     << " per axis)";
  return os.str();
}

FrameBoundsEvaluator::FrameBoundsEvaluator(const SystemSpec& spec) : system_(spec) {
  if (system_.dim() != 2) throw ConstraintError("frame-bound estimates are implemented for 2D systems");
}

FrequencyGrid FrameBoundsEvaluator::default_grid(int per_octave) const {
  FrequencyGrid g;
  g.per_octave = per_octave;
  g.hi = system_.nyquist();
  g.lo = std::ldexp(g.hi, -(system_.J_max() + 5));
  return g;
}

ThetaParts FrameBoundsEvaluator::theta(const Vec3& xi, const Vec3& omega) const {
  ThetaParts out;
  const auto& bands = system_.bands();
  const Vec3 xs{xi[0] + omega[0], xi[1] + omega[1], 0.0};
  out.scaling = std::abs(system_.band_generator(bands[0], xi)) * std::abs(system_.band_generator(bands[0], xs));
  for (std::size_t bi = 1; bi < bands.size(); ++bi) {
    const Band& b = bands[bi];
    const double a = std::abs(system_.band_generator(b, xi));
    if (a == 0.0) continue;
    if (omega[0] == 0.0 && omega[1] == 0.0) {
      // Mapping back through the inverse shear would perturb points on the
      // cone seam across the cut.
      (b.region == 1 ? out.cone1 : out.cone2) += a * a;
      continue;
    }
    Vec3 eta = b.BinvT * xi;
    for (int k = 0; k < 2; ++k) eta[k] += omega[k];
    const Vec3 shifted = b.BinvT.inverse() * eta;
    const double v = a * std::abs(system_.band_generator(b, shifted));
    (b.region == 1 ? out.cone1 : out.cone2) += v;
  }
  return out;
}

std::vector<double> FrameBoundsEvaluator::component_grid(int i, const Vec3& omega,
                                                         const std::vector<double>& axis) const {
  const std::size_t G = axis.size();
  const auto& bands = system_.bands();
  const GeneratorSet& gs = system_.generators();
  const bool compact = gs.kind == GeneratorKind::CompactSeparable;

  if (i == 0) {
    std::vector<double> grid(G * G, 0.0);
    if (compact) {
      const ScalingTable& T = *system_.scaling_table();
      std::vector<double> p1(G), p2(G);
      for (std::size_t q = 0; q < G; ++q) {
        p1[q] = std::abs(T(axis[q])) * std::abs(T(axis[q] + omega[0]));
        p2[q] = std::abs(T(axis[q])) * std::abs(T(axis[q] + omega[1]));
      }
      for (std::size_t r = 0; r < G; ++r)
        for (std::size_t c = 0; c < G; ++c) grid[r * G + c] = p1[r] * p2[c];
    } else if (gs.kind != GeneratorKind::Zero) {
      for (std::size_t r = 0; r < G; ++r)
        for (std::size_t c = 0; c < G; ++c) {
          const Vec3 x{axis[r], axis[c], 0.0};
          const Vec3 xs{axis[r] + omega[0], axis[c] + omega[1], 0.0};
          grid[r * G + c] = std::abs(system_.band_generator(bands[0], x)) *
                            std::abs(system_.band_generator(bands[0], xs));
        }
    }
    return grid;
  }

  std::vector<std::size_t> members;
  for (std::size_t bi = 1; bi < bands.size(); ++bi)
    if (bands[bi].region == i) members.push_back(bi);
  if (gs.kind == GeneratorKind::Zero) return std::vector<double>(G * G, 0.0);

  return accumulate_parallel(members.size(), G * G, [&](std::size_t item, std::vector<double>& acc) {
    const Band& b = bands[members[item]];
    const int a = b.region - 1;  // long axis
    const int o = 1 - a;
    if (!compact) {
      const Matrix back = b.BinvT.inverse();
      const bool unshifted = omega[0] == 0.0 && omega[1] == 0.0;
      for (std::size_t r = 0; r < G; ++r)
        for (std::size_t c = 0; c < G; ++c) {
          const Vec3 x{axis[r], axis[c], 0.0};
          const double v = std::abs(system_.band_generator(b, x));
          if (v == 0.0) continue;
          if (unshifted) {
            acc[r * G + c] += v * v;
            continue;
          }
          Vec3 eta = b.BinvT * x;
          eta[0] += omega[0];
          eta[1] += omega[1];
          acc[r * G + c] += v * std::abs(system_.band_generator(b, back * eta));
        }
      return;
    }
    const ScalingTable& T = *system_.scaling_table();
    const FilterPair& f = *gs.phi.filters;
    auto along = [&](double t) { return std::abs(f.m1(4.0 * t)) * std::abs(T(t)); };
    auto across = [&](double s) { return std::abs(T(2.0 * s)); };
    const double s_a = b.BinvT(a, a), c_b = b.BinvT(o, o), c_a = b.BinvT(o, a);
    const bool flat_a = omega[a] == 0.0, flat_o = omega[o] == 0.0;
    for (std::size_t qa = 0; qa < G; ++qa) {
      const double ta = s_a * axis[qa];
      const double ua = along(ta);
      const double u = ua * (flat_a ? ua : along(ta + omega[a]));
      if (u < kNegligible) continue;
      for (std::size_t qb = 0; qb < G; ++qb) {
        const double tb = c_b * axis[qb] + c_a * axis[qa];
        const double vb = across(tb);
        const double v = u * vb * (flat_o ? vb : across(tb + omega[o]));
        const std::size_t idx = a == 0 ? qa * G + qb : qb * G + qa;
        acc[idx] += v;
      }
    }
  });
}

std::pair<double, double> FrameBoundsEvaluator::theta_extrema(const FrequencyGrid& grid) const {
  const auto axis = grid.axis();
  const Vec3 zero{0, 0, 0};
  std::vector<double> total = component_grid(0, zero, axis);
  for (int i = 1; i <= 2; ++i) {
    const auto part = component_grid(i, zero, axis);
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
  }
  const auto [mn, mx] = std::minmax_element(total.begin(), total.end());
  return {*mn, *mx};
}

double FrameBoundsEvaluator::gamma(int i, const Vec3& omega, const FrequencyGrid& grid) const {
  if (i < 0 || i > 2) throw ConstraintError("Gamma index must be 0, 1 or 2");
  const auto g = component_grid(i, omega, grid.axis());
  return *std::max_element(g.begin(), g.end());
}

double FrameBoundsEvaluator::r_of_c(double c1, double c2, const FrequencyGrid& grid, int m_radius,
                                    double* tail, int* shells) const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConstraintError("sampling constants must be positive");
  if (m_radius < 1) throw ConstraintError("lattice radius must be at least 1");
  double total = 0.0, prev = 0.0, last = 0.0;
  int s = 1;
  for (; s <= m_radius; ++s) {
    // Gamma_i(-w) = Gamma_i(w) for real generators, so the shell is summed
    // over the half plane {m1 > 0} u {m1 = 0, m2 > 0} and doubled.
    double shell = 0.0;
    for (int m1 = 0; m1 <= s; ++m1)
      for (int m2 = -s; m2 <= s; ++m2) {
        if (std::max(std::abs(m1), std::abs(m2)) != s) continue;
        if (m1 == 0 && m2 <= 0) continue;
        const double x = m1, y = m2;
        shell += gamma(0, {x / c1, y / c1, 0}, grid);
        shell += gamma(1, {x / c1, y / c2, 0}, grid);
        shell += gamma(2, {x / c2, y / c1, 0}, grid);
      }
    shell *= 2.0;
    prev = last;
    last = shell;
    total += shell;
    // Theta is O(1) for normalized generators, so shells below 1e-15 in
    // absolute terms are roundoff even when the running total is too.
    if (s >= 2 && shell <= 1e-15 * std::max(total, 1.0)) break;
  }
  const bool negligible = last <= 1e-15 * std::max(total, 1.0);
  const int used = std::min(s, m_radius);
  double est = 0.0;
  if (last > 0.0 && used >= 2) {
    if (negligible) {
      // The last shells are roundoff, so their ratio says nothing about decay.
      est = last * used;
    } else if (prev > last) {
      const double p = std::log(prev / last) / std::log(static_cast<double>(used) / (used - 1));
      est = p > 1.0 ? last * used / (p - 1.0) : std::numeric_limits<double>::infinity();
    } else {
      est = std::numeric_limits<double>::infinity();
    }
  }
  if (tail) *tail = est;
  if (shells) *shells = used;
  return total;
}

std::string FrameBoundsReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "c = (" << c1 << ", " << c2 << "), det M_c = " << det_Mc << "\n"
     << "L_inf ~ " << L_inf_est << "   L_sup ~ " << L_sup_est << "\n"
     << "R(c) ~ " << R_c << " (tail estimate " << R_tail << ", " << shells_used << " of " << m_radius
     << " shells)\n"
     << "A >= " << A_lower << "   B <= " << B_upper << "\n"
     << "scales used: " << J_used << "\n"
     << "theta grid: " << theta_grid << "\n"
     << "gamma grid: " << gamma_grid << "\n"
     << (certified ? "frame certified" : "not certified") << "\n";
  return os.str();
}

std::string FrameBoundsReport::to_csv() const {
  std::ostringstream os;
  os << "# frame-bound sandwich; R_c includes R_tail\n"
     << "c1,c2,det_Mc,L_inf_est,L_sup_est,R_c,R_tail,A_lower,B_upper,certified,J_used,shells_used,m_radius\n"
     << format_double(c1) << ',' << format_double(c2) << ',' << format_double(det_Mc) << ','
     << format_double(L_inf_est) << ',' << format_double(L_sup_est) << ',' << format_double(R_c) << ','
     << format_double(R_tail) << ',' << format_double(A_lower) << ',' << format_double(B_upper) << ','
     << (certified ? 1 : 0) << ',' << J_used << ',' << shells_used << ',' << m_radius << '\n';
  return os.str();
}

FrameBoundsReport estimate_bounds(const SystemSpec& spec, int theta_per_octave, int gamma_per_octave,
                                  int m_radius) {
  const FrameBoundsEvaluator ev(spec);
  FrameBoundsReport r;
  const FrequencyGrid tg = ev.default_grid(theta_per_octave);
  const FrequencyGrid gg = ev.default_grid(gamma_per_octave);
  std::tie(r.L_inf_est, r.L_sup_est) = ev.theta_extrema(tg);
  r.c1 = spec.c1;
  r.c2 = spec.c2;
  r.m_radius = m_radius;
  double tail = 0.0;
  const double sum = ev.r_of_c(spec.c1, spec.c2, gg, m_radius, &tail, &r.shells_used);
  r.R_tail = tail;
  r.R_c = sum + tail;
  r.det_Mc = ev.system().sampling_det();
  r.A_lower = (r.L_inf_est - r.R_c) / r.det_Mc;
  r.B_upper = (r.L_sup_est + r.R_c) / r.det_Mc;
  r.certified = r.L_inf_est - r.R_c > 0.0;
  r.J_used = ev.J_cap();
  r.theta_grid = tg.describe();
  r.gamma_grid = gg.describe();
  return r;
}

std::pair<double, double> empirical_frame_check(const ShearletTransform& t, int n_random, std::uint64_t seed) {
  if (n_random < 1) throw ConstraintError("need at least one random raster");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k < n_random; ++k) {
    Raster f = t.zeros();
    for (double& v : f.data) v = g(rng);
    const double nf = t.inner(f, f);
    const CoefficientSet c = t.analyze(f);
    double e = 0.0;
    for (double v : c.values) e += v * v;
    lo = std::min(lo, e / nf);
    hi = std::max(hi, e / nf);
  }
  return {lo, hi};
}

double largest_certified_c(const SystemSpec& spec, double lo, double hi, int steps, int gamma_per_octave,
                           int m_radius) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConstraintError("need 0 < lo < hi");
  const FrameBoundsEvaluator ev(spec);
  const double L_inf = ev.theta_extrema(ev.default_grid(48)).first;
  const FrequencyGrid gg = ev.default_grid(gamma_per_octave);
  auto ok = [&](double c) {
    double tail = 0.0;
    const double r = ev.r_of_c(c, c, gg, m_radius, &tail);
    return L_inf - (r + tail) > 0.0;
  };
  if (ok(hi)) return hi;
  if (!ok(lo)) return 0.0;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (a + b);
    (ok(std::exp(mid)) ? a : b) = mid;
  }
  return std::exp(a);
}

}  // namespace shearlab
