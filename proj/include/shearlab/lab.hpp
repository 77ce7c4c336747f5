// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shearlab/transform.hpp"

namespace shearlab {

/// N-term approximation errors ||f - f_N||^2 (unit-domain L2, i.e. the pixel
/// mean of squared differences) with a log-log fit over a window.
struct RateCurve {
  std::string label;
  std::vector<std::size_t> Ns;
  std::vector<double> errors;
  std::pair<std::size_t, std::size_t> fit_window{128, 4096};
  double fitted_slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  std::string to_csv() const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log N, log error) for N inside the window.
/// Throws FitError with fewer than 4 points, non-positive errors or a
/// degenerate abscissa.
RateFit fit_rate(const std::vector<std::size_t>& Ns, const std::vector<double>& errors,
                 std::pair<std::size_t, std::size_t> window);
/// Fits curve in place over its own window and returns the slope.
double fit_rate(RateCurve& curve);

/// round(2^(e / per_octave)) for e from lo_exp * per_octave to
/// hi_exp * per_octave, duplicates dropped.
std::vector<std::size_t> dyadic_counts(int lo_exp, int hi_exp, int per_octave = 2);

/// Shearlet N-term curve: analyze once, keep the N largest coefficients
/// (ties toward the smaller index), synthesize and invert the frame operator
/// by CG at `tol`. SolverError is rethrown with the offending N in its text.
RateCurve nterm_curve(const Raster& f, const ShearletTransform& t, const std::vector<std::size_t>& Ns,
                      std::pair<std::size_t, std::size_t> window, double tol = 1e-6, int max_iter = 500);

/// Periodic separable orthonormal wavelet transform on a power-of-two raster.
class WaveletBasis {
 public:
  /// Daubechies filter with `vanishing` moments; `levels` = 0 decomposes down
  /// to the coarsest grid at least as long as the filter.
  WaveletBasis(int dim, std::size_t n, int vanishing = 4, int levels = 0);

  std::vector<double> forward(const Raster& f) const;
  Raster inverse(const std::vector<double>& c) const;
  int levels() const { return levels_; }
  const std::vector<double>& lowpass() const { return h_; }

 private:
  int dim_;
  std::size_t n_;
  int levels_;
  std::vector<double> h_, g_;
};

/// N-term curve of the orthonormal wavelet basis. By Parseval the error is
/// the energy of the discarded coefficients.
RateCurve wavelet_baseline_curve(const Raster& f, const std::vector<std::size_t>& Ns,
                                 std::pair<std::size_t, std::size_t> window, int vanishing = 4);

/// Standard deviation of each band's coefficients under unit-variance white
/// pixel noise, from the band spectra.
std::vector<double> band_noise_std(const ShearletTransform& t);

/// Threshold tau_band = kappa * sigma_band * sqrt(2 log M), M the coefficient
/// count. sigma <= 0 estimates the pixel noise level from the finest bands
/// by the median absolute deviation.
struct ThresholdRule {
  double kappa = 0.6;
  double sigma = -1.0;
};

struct DenoiseResult {
  Raster estimate;
  double sigma = 0.0;  // noise level used
  double psnr_before = 0.0;
  double psnr_after = 0.0;
  std::size_t kept = 0;
  int iterations = 0;
};

/// 10 log10(peak^2 / MSE) with peak = max - min of the reference.
double psnr(const Raster& reference, const Raster& x);

/// Analyze, hard-threshold band by band, synthesize and invert S.
DenoiseResult denoise(const Raster& noisy, const Raster& clean, const ShearletTransform& t,
                      const ThresholdRule& rule, double tol = 1e-6, int max_iter = 500);

/// Seeded Gaussian noise with standard deviation chosen so the noisy raster
/// has the requested PSNR against `clean`.
Raster add_noise_at_psnr(const Raster& clean, double psnr_db, std::uint64_t seed, double* sigma = nullptr);

}  // namespace shearlab
