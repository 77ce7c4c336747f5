// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "shearlab/systems.hpp"

namespace shearlab {

/// Real raster on the periodic grid {0..n-1}^dim, row-major (last axis
/// fastest). `spacing` is the physical pixel size that maps the raster onto
/// [0,1]^dim.
struct Raster {
  int dim = 2;
  std::array<std::size_t, 3> extents{0, 0, 1};
  double spacing = 0.0;
  std::vector<double> data;

  Raster() = default;
  Raster(int dim, std::size_t n);
  std::size_t size() const { return data.size(); }
  /// Throws ShapeError unless every extent is a power of two >= 8 and data
  /// is finite with matching size.
  void validate() const;
};

/// Coefficients of one system, dense (every index) or sparse (sorted flat
/// positions with values).
struct CoefficientSet {
  SystemSpec spec;        // identity of the producing system
  std::size_t total = 0;  // dense size of that system
  bool dense = true;
  bool saturated = false;  // set by n_largest when N exceeded the total
  std::vector<std::uint64_t> positions;  // sparse form only
  std::vector<double> values;

  std::size_t stored() const { return values.size(); }
  /// Dense copy (zeros where a sparse set has no entry).
  std::vector<double> to_dense() const;
};

struct TransformOptions {
  /// Upper bound on memory used to cache band spectra between passes.
  std::size_t cache_bytes = std::size_t{1} << 30;
  /// Worker threads; 0 uses the process-wide setting (see set_num_threads).
  int threads = 0;
};

void set_num_threads(int n);
int num_threads();

struct SolveResult {
  Raster x;
  int iterations = 0;
  std::vector<double> residuals;  // relative residual after each iteration
};

/// Digital shearlet frame on a periodic raster.
///
/// Digitization. The raster pixel spacing h (generator units) puts the
/// finest band at the raster Nyquist frequency, and f_hat(xi_q) is taken
/// from the DFT on the grid xi_q = q / (n h). Each element is the periodized
/// band-limited function with Fourier coefficients
///     D(q) exp(-2 pi i xi_q . x),  D(q) = norm * psi_r(BinvT xi_q),
/// where norm carries the 2^{3j/4} (2D) or 2^j (3D) dilation factor and the
/// determinant of the dilation. On Nyquist bins, whose frequency is shared
/// by +-xi_N, D carries the alias-averaged energy with the phase of the
/// averaged value so that every element stays real.
///
/// Lattices. A band's continuum lattice spacing s (pixels) along each axis
/// is realized by the power of two d <= s, and its coefficients are scaled by
/// sqrt(d_1 ... d_dim h^dim / V), V the continuum cell volume. With this
/// weight the diagonal of the frame operator equals Theta(xi, 0) / det(M_c).
///
/// Inner products. Rasters use the L2 product of the periodic domain in
/// generator units, <f, g> = h^dim sum f g; coefficients use the plain l2
/// product. synthesize is the exact adjoint of analyze under these products.
class ShearletTransform {
 public:
  explicit ShearletTransform(const SystemSpec& spec, TransformOptions options = {});

  const ShearletSystem& system() const { return *system_; }
  const TransformOptions& options() const { return options_; }

  CoefficientSet analyze(const Raster& f) const;
  Raster synthesize(const CoefficientSet& c) const;
  Raster frame_operator(const Raster& f) const;
  /// Preconditioned conjugate gradients for S x = y. The preconditioner is
  /// the inverse of the Fourier diagonal of S. The returned iterate is
  /// minimal-residual smoothed, so residuals[k] = ||y - S x_k|| / ||y|| is
  /// non-increasing.
  SolveResult invert_frame(const Raster& y, double tol, int max_iter) const;

  /// The K largest coefficients of analyze(f), computed band by band without
  /// storing the dense set. Ties resolve toward the smaller flat position.
  CoefficientSet largest_coefficients(const Raster& f, std::size_t K) const;

  /// Raster inner product h^dim sum f g.
  double inner(const Raster& f, const Raster& g) const;
  Raster zeros() const;

  /// Digital spectrum of a band on the half grid (last axis n/2 + 1 long).
  std::vector<cplx> band_spectrum(std::size_t band) const;
  /// The same value at one full-grid frequency index, using the exact
  /// generator spectra instead of tables (oracle path).
  cplx band_spectrum_exact(std::size_t band, const std::array<std::size_t, 3>& q) const;
  /// Fourier diagonal of S on the half grid: sum_bands |D|^2 / V.
  const std::vector<double>& frame_diagonal() const;
  /// Samples of the element (band, lattice point p) on the raster grid,
  /// computed by a direct inverse DFT (oracle path, small rasters only).
  Raster render_element(std::size_t band, const std::array<std::size_t, 3>& p) const;

  struct Impl;

 private:
  std::shared_ptr<const ShearletSystem> system_;
  TransformOptions options_;
  std::shared_ptr<Impl> impl_;
};

// Free-function forms of the transform operations.
CoefficientSet analyze(const Raster& f, const ShearletTransform& t);
Raster synthesize(const CoefficientSet& c, const ShearletTransform& t);
Raster frame_operator(const Raster& f, const ShearletTransform& t);
SolveResult invert_frame(const Raster& y, const ShearletTransform& t, double tol, int max_iter);

/// Sparse set holding exactly min(N, stored) entries of largest magnitude,
/// ties broken toward the earlier index in enumeration order.
CoefficientSet n_largest(const CoefficientSet& c, std::size_t N);
/// Entries with |value| > tau.
CoefficientSet hard_threshold(const CoefficientSet& c, double tau);
/// S^{-1} synthesize(n_largest(analyze(f), N)).
SolveResult reconstruct_nterm(const Raster& f, const ShearletTransform& t, std::size_t N,
                              double tol = 1e-6, int max_iter = 500);

/// Coefficient inner product (dense or sparse operands of the same system).
double coefficient_inner(const CoefficientSet& a, const CoefficientSet& b);

}  // namespace shearlab
