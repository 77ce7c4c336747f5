// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "shearlab/errors.hpp"
#include "shearlab/filters.hpp"

namespace shearlab {

namespace {

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

double mean_square_diff(const Raster& a, const Raster& b) {
  if (a.data.size() != b.data.size()) throw ShapeError("rasters differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return s / static_cast<double>(a.data.size());
}

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Rate fitting

std::string RateCurve::to_csv() const {
  std::ostringstream os;
  os << "# label=" << label << '\n'
     << "# fit_window=" << fit_window.first << ',' << fit_window.second << '\n'
     << "# fitted_slope=" << sci(fitted_slope) << '\n'
     << "# intercept=" << sci(intercept) << '\n'
     << "# r_squared=" << sci(r_squared) << '\n'
     << "N,error\n";
  for (std::size_t i = 0; i < Ns.size(); ++i) os << Ns[i] << ',' << sci(errors[i]) << '\n';
  return os.str();
}

RateFit fit_rate(const std::vector<std::size_t>& Ns, const std::vector<double>& errors,
                 std::pair<std::size_t, std::size_t> window) {
  if (Ns.size() != errors.size()) throw FitError("N and error lists differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i] < window.first || Ns[i] > window.second) continue;
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw FitError("error at N = " + std::to_string(Ns[i]) + " is not positive");
    x.push_back(std::log(static_cast<double>(Ns[i])));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 4) throw FitError("rate fit needs at least 4 points in the window");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("rate fit window has a single distinct N");
  RateFit r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  // Constant data fits exactly with slope 0.
  r.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  r.points = x.size();
  return r;
}

double fit_rate(RateCurve& curve) {
  const RateFit f = fit_rate(curve.Ns, curve.errors, curve.fit_window);
  curve.fitted_slope = f.slope;
  curve.intercept = f.intercept;
  curve.r_squared = f.r_squared;
  return f.slope;
}

std::vector<std::size_t> dyadic_counts(int lo_exp, int hi_exp, int per_octave) {
  if (per_octave < 1 || lo_exp > hi_exp || lo_exp < 0 || hi_exp > 40)
    throw ConstraintError("invalid dyadic count range");
  std::vector<std::size_t> Ns;
  for (int e = lo_exp * per_octave; e <= hi_exp * per_octave; ++e) {
    const auto N = static_cast<std::size_t>(std::llround(std::exp2(double(e) / per_octave)));
    if (Ns.empty() || N > Ns.back()) Ns.push_back(N);
  }
  return Ns;
}

// ---------------------------------------------------------------------------
// Shearlet N-term curve

RateCurve nterm_curve(const Raster& f, const ShearletTransform& t, const std::vector<std::size_t>& Ns,
                      std::pair<std::size_t, std::size_t> window, double tol, int max_iter) {
  if (!std::is_sorted(Ns.begin(), Ns.end()) || std::adjacent_find(Ns.begin(), Ns.end()) != Ns.end())
    throw ConstraintError("N values must be strictly increasing");
  RateCurve curve;
  curve.label = "shearlet";
  curve.fit_window = window;
  curve.Ns = Ns;
  if (Ns.empty()) return curve;
  const std::size_t total = t.system().coefficient_count();
  if (Ns.back() > total) throw ConstraintError("N exceeds the coefficient count");

  // Streaming selection keeps memory at O(N) even when the dense set would
  // not fit. Every N then takes a prefix of one (|value| desc, position asc)
  // ordering, which is the same tie rule n_largest applies.
  const CoefficientSet c = t.largest_coefficients(f, Ns.back());
  std::vector<std::size_t> order(c.stored());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = std::abs(c.values[a]), vb = std::abs(c.values[b]);
    return va != vb ? va > vb : c.positions[a] < c.positions[b];
  });

  for (std::size_t N : Ns) {
    CoefficientSet s;
    s.spec = c.spec;
    s.total = c.total;
    s.dense = false;
    std::vector<std::size_t> pick(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(N, order.size())));
    std::sort(pick.begin(), pick.end());
    for (std::size_t i : pick) {
      s.positions.push_back(c.positions[i]);
      s.values.push_back(c.values[i]);
    }
    SolveResult r;
    try {
      r = t.invert_frame(t.synthesize(s), tol, max_iter);
    } catch (const SolverError& e) {
      throw SolverError("N-term reconstruction at N = " + std::to_string(N) + ": " + e.what(),
                        e.residual_history());
    }
    curve.errors.push_back(mean_square_diff(f, r.x));
  }
  fit_rate(curve);
  return curve;
}

// ---------------------------------------------------------------------------
// Wavelet baseline

WaveletBasis::WaveletBasis(int dim, std::size_t n, int vanishing, int levels) : dim_(dim), n_(n) {
  if (dim != 2 && dim != 3) throw ConstraintError("wavelet baseline supports 2D and 3D");
  if (!power_of_two(n)) throw ShapeError("wavelet raster extent must be a power of two");
  // K = L gives the Daubechies product filter, so sqrt(2) h0 is orthonormal.
  const FilterPair p = spectral_factorize(vanishing, vanishing, true);
  for (double v : p.h0) h_.push_back(std::sqrt(2.0) * v);
  const std::size_t len = h_.size();
  for (std::size_t k = 0; k < len; ++k) g_.push_back((k % 2 ? -1.0 : 1.0) * h_[len - 1 - k]);
  int maxlev = 0;
  for (std::size_t m = n; m / 2 >= len && m >= 4; m /= 2) ++maxlev;
  levels_ = levels > 0 ? std::min(levels, maxlev) : maxlev;
  if (levels_ < 1) throw ShapeError("raster too small for the wavelet filter");
}

namespace {

// One periodic analysis or synthesis step on m samples at stride s.
void step_1d(double* x, std::size_t m, std::size_t s, const std::vector<double>& h, const std::vector<double>& g,
             bool forward, std::vector<double>& tmp) {
  tmp.assign(m, 0.0);
  const std::size_t half = m / 2, len = h.size();
  if (forward) {
    for (std::size_t k = 0; k < half; ++k) {
      double a = 0.0, d = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        const double v = x[((2 * k + t) % m) * s];
        a += h[t] * v;
        d += g[t] * v;
      }
      tmp[k] = a;
      tmp[half + k] = d;
    }
  } else {
    for (std::size_t k = 0; k < half; ++k)
      for (std::size_t t = 0; t < len; ++t) tmp[(2 * k + t) % m] += h[t] * x[k * s] + g[t] * x[(half + k) * s];
  }
  for (std::size_t i = 0; i < m; ++i) x[i * s] = tmp[i];
}

}  // namespace

std::vector<double> WaveletBasis::forward(const Raster& f) const {
  if (f.dim != dim_ || f.extents[0] != n_) throw ShapeError("raster does not match the wavelet basis");
  std::vector<double> c = f.data;
  std::vector<double> tmp;
  const std::size_t n = n_;
  const std::size_t strides[3] = {dim_ == 3 ? n * n : n, dim_ == 3 ? n : 1, 1};
  std::size_t m = n;
  for (int lev = 0; lev < levels_; ++lev, m /= 2)
    for (int a = 0; a < dim_; ++a) {
      // All lines along axis a inside the leading m^dim block.
      const int o1 = (a + 1) % dim_, o2 = (a + 2) % dim_;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < (dim_ == 3 ? m : 1); ++l) {
          const std::size_t base = i * strides[o1] + (dim_ == 3 ? l * strides[o2] : 0);
          step_1d(c.data() + base, m, strides[a], h_, g_, true, tmp);
        }
    }
  return c;
}

Raster WaveletBasis::inverse(const std::vector<double>& c) const {
  Raster f(dim_, n_);
  if (c.size() != f.data.size()) throw ShapeError("wavelet coefficient count does not match");
  f.data = c;
  std::vector<double> tmp;
  const std::size_t n = n_;
  const std::size_t strides[3] = {dim_ == 3 ? n * n : n, dim_ == 3 ? n : 1, 1};
  for (int lev = levels_ - 1; lev >= 0; --lev) {
    const std::size_t m = n >> lev;
    for (int a = dim_ - 1; a >= 0; --a) {
      const int o1 = (a + 1) % dim_, o2 = (a + 2) % dim_;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < (dim_ == 3 ? m : 1); ++l) {
          const std::size_t base = i * strides[o1] + (dim_ == 3 ? l * strides[o2] : 0);
          step_1d(f.data.data() + base, m, strides[a], h_, g_, false, tmp);
        }
    }
  }
  return f;
}

RateCurve wavelet_baseline_curve(const Raster& f, const std::vector<std::size_t>& Ns,
                                 std::pair<std::size_t, std::size_t> window, int vanishing) {
  if (!std::is_sorted(Ns.begin(), Ns.end()) || std::adjacent_find(Ns.begin(), Ns.end()) != Ns.end())
    throw ConstraintError("N values must be strictly increasing");
  const WaveletBasis w(f.dim, f.extents[0], vanishing);
  std::vector<double> sq = w.forward(f);
  for (double& v : sq) v *= v;
  if (!Ns.empty() && Ns.back() > sq.size()) throw ConstraintError("N exceeds the coefficient count");
  std::sort(sq.begin(), sq.end(), std::greater<>());
  // Discarded energy from the small end, so tiny tails keep their precision.
  std::vector<double> tail(sq.size() + 1, 0.0);
  for (std::size_t i = sq.size(); i-- > 0;) tail[i] = tail[i + 1] + sq[i];
  RateCurve curve;
  curve.label = "wavelet";
  curve.fit_window = window;
  curve.Ns = Ns;
  for (std::size_t N : Ns) curve.errors.push_back(tail[N] / static_cast<double>(sq.size()));
  if (!Ns.empty()) fit_rate(curve);
  return curve;
}

// ---------------------------------------------------------------------------
// Denoising

std::vector<double> band_noise_std(const ShearletTransform& t) {
  // c = w sum_x f(x) a(x) with sum_x a(x)^2 = N^-d sum_q |D_q|^2 over the
  // full grid; the half grid counts interior columns twice.
  const ShearletSystem& sys = t.system();
  const int d = sys.dim();
  const std::size_t n = sys.extent();
  const std::size_t last = n / 2 + 1;
  const double Nd = std::pow(static_cast<double>(n), d);
  std::vector<double> out;
  for (std::size_t b = 0; b < sys.bands().size(); ++b) {
    const auto D = t.band_spectrum(b);
    double s = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i) {
      const std::size_t q = i % last;
      s += (q == 0 || q == n / 2 ? 1.0 : 2.0) * std::norm(D[i]);
    }
    out.push_back(sys.bands()[b].weight * std::sqrt(s / Nd));
  }
  return out;
}

double psnr(const Raster& reference, const Raster& x) {
  const auto [lo, hi] = std::minmax_element(reference.data.begin(), reference.data.end());
  const double peak = *hi - *lo;
  const double mse = mean_square_diff(reference, x);
  if (mse == 0.0) return INFINITY;
  return 10.0 * std::log10(peak * peak / mse);
}

Raster add_noise_at_psnr(const Raster& clean, double psnr_db, std::uint64_t seed, double* sigma) {
  const auto [lo, hi] = std::minmax_element(clean.data.begin(), clean.data.end());
  const double s = (*hi - *lo) * std::pow(10.0, -psnr_db / 20.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, s);
  Raster out = clean;
  for (double& v : out.data) v += g(rng);
  if (sigma) *sigma = s;
  return out;
}

DenoiseResult denoise(const Raster& noisy, const Raster& clean, const ShearletTransform& t,
                      const ThresholdRule& rule, double tol, int max_iter) {
  if (rule.kappa < 0.0) throw ConstraintError("threshold factor must be non-negative");
  const CoefficientSet c = t.analyze(noisy);
  const auto& bands = t.system().bands();
  const std::vector<double> unit = band_noise_std(t);

  DenoiseResult r;
  r.sigma = rule.sigma;
  if (!(r.sigma > 0.0)) {
    std::vector<double> z;
    for (std::size_t b = 0; b < bands.size(); ++b)
      if (bands[b].j == t.system().J_max() - 1 && unit[b] > 0.0)
        for (std::size_t i = 0; i < bands[b].size; ++i) z.push_back(std::abs(c.values[bands[b].offset + i]) / unit[b]);
    if (z.empty()) throw ConstraintError("no fine-scale bands to estimate the noise level");
    std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(z.size() / 2), z.end());
    r.sigma = z[z.size() / 2] / 0.6744897501960817;
  }

  const double root = std::sqrt(2.0 * std::log(static_cast<double>(c.total)));
  CoefficientSet kept;
  kept.spec = c.spec;
  kept.total = c.total;
  kept.dense = false;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const double tau = rule.kappa * r.sigma * unit[b] * root;
    for (std::size_t i = 0; i < bands[b].size; ++i) {
      const std::size_t p = bands[b].offset + i;
      if (std::abs(c.values[p]) > tau || rule.kappa == 0.0) {
        kept.positions.push_back(p);
        kept.values.push_back(c.values[p]);
      }
    }
  }
  r.kept = kept.stored();
  const SolveResult s = t.invert_frame(t.synthesize(kept), tol, max_iter);
  r.estimate = s.x;
  r.iterations = s.iterations;
  r.psnr_before = psnr(clean, noisy);
  r.psnr_after = psnr(clean, r.estimate);
  return r;
}

}  // namespace shearlab
