// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shearlab/systems.hpp"

namespace shearlab {

class ShearletTransform;

/// Symmetric dyadic frequency grid on [-hi, hi]: zero, +-hi, and
/// +-2^o (1 + i / per_octave) for every octave between lo and hi. Doubling
/// per_octave keeps all earlier points, so grid extrema refine monotonically.
struct FrequencyGrid {
  int per_octave = 48;
  double lo = 0.0;
  double hi = 0.0;

  std::vector<double> axis() const;
  std::size_t points_per_axis() const { return axis().size(); }
  std::string describe() const;
};

/// The three parts of Theta(xi, omega): scaling, horizontal cones,
/// vertical cones.
struct ThetaParts {
  double scaling = 0.0;
  double cone1 = 0.0;
  double cone2 = 0.0;
  double total() const { return scaling + cone1 + cone2; }
};

struct FrameBoundsReport {
  double L_inf_est = 0.0;
  double L_sup_est = 0.0;
  double R_c = 0.0;
  double R_tail = 0.0;  // estimate of the lattice terms beyond the last shell
  double A_lower = 0.0;
  double B_upper = 0.0;
  double det_Mc = 1.0;
  bool certified = false;
  double c1 = 1.0, c2 = 1.0;
  int J_used = 0;
  int m_radius = 0;       // requested shell cap
  int shells_used = 0;    // shells actually summed
  std::string theta_grid;
  std::string gamma_grid;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Theta, Gamma and R(c) of a 2D system, with the scale sum truncated to
/// j < J_cap (the scales the digital system realizes) and suprema and
/// infima taken over the raster's Nyquist box.
///
/// The shear argument of each term is (S_k A_{2^j})^{-T} xi. Over the
/// symmetric shear range this is the same set of arguments as
/// S_k^T A_{2^-j} xi, so Theta(xi, 0) / det(M_c) is exactly the Fourier
/// diagonal of the digital frame operator. Band-limited generators are cut
/// to their cones as in the transform.
class FrameBoundsEvaluator {
 public:
  explicit FrameBoundsEvaluator(const SystemSpec& spec);

  const ShearletSystem& system() const { return system_; }
  int J_cap() const { return system_.J_max(); }
  /// Default grid for Theta(xi, 0) extrema and for Gamma suprema.
  FrequencyGrid default_grid(int per_octave) const;

  /// Pointwise Theta from the exact generator spectra.
  ThetaParts theta(const Vec3& xi, const Vec3& omega) const;
  /// Grid minimum and maximum of Theta(xi, 0).
  std::pair<double, double> theta_extrema(const FrequencyGrid& grid) const;
  /// Gamma_i(omega), i in {0, 1, 2}, as a grid supremum.
  double gamma(int i, const Vec3& omega, const FrequencyGrid& grid) const;
  /// Lattice sum over 0 < ||m||_inf <= m_radius, stopping early once a shell
  /// adds less than 1e-15 of max(running total, 1). `tail` receives a power-law
  /// estimate of the omitted shells, `shells` the number summed.
  double r_of_c(double c1, double c2, const FrequencyGrid& grid, int m_radius,
                double* tail = nullptr, int* shells = nullptr) const;

 private:
  // Grid values of one Theta component for a fixed omega.
  std::vector<double> component_grid(int i, const Vec3& omega, const std::vector<double>& axis) const;

  ShearletSystem system_;
};

/// Frame-bound sandwich (L_inf - R) / det M_c <= A <= B <= (L_sup + R) / det M_c.
/// A non-positive lower bound gives certified = false (no exception).
FrameBoundsReport estimate_bounds(const SystemSpec& spec, int theta_per_octave = 48,
                                  int gamma_per_octave = 12, int m_radius = 32);

/// Rayleigh quotients ||analyze(f)||^2 / ||f||^2 over n_random Gaussian rasters.
std::pair<double, double> empirical_frame_check(const ShearletTransform& t, int n_random,
                                                std::uint64_t seed = 1);

/// Largest c = c1 = c2 in [lo, hi] certified by the sandwich, by bisection in
/// log c; returns 0 when even `lo` fails.
double largest_certified_c(const SystemSpec& spec, double lo, double hi, int steps = 12,
                           int gamma_per_octave = 12, int m_radius = 32);

}  // namespace shearlab
