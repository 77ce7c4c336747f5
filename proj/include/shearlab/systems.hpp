// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "shearlab/filters.hpp"

namespace shearlab {

/// Small dense matrix of size dim x dim (dim <= 3), row-major.
struct Matrix {
  int dim = 2;
  std::array<double, 9> a{};

  double& operator()(int r, int c) { return a[3 * r + c]; }
  double operator()(int r, int c) const { return a[3 * r + c]; }
  static Matrix identity(int dim);
  Matrix operator*(const Matrix& o) const;
  Vec3 operator*(const Vec3& v) const;
  Matrix transpose() const;
  Matrix inverse() const;
  double determinant() const;
};

/// 0 selects A (wavelet factor on axis 0), 1 selects A-tilde (axis 1) and
/// 2 selects A-breve (axis 2, 3D only). The same convention selects the
/// shear and sampling matrices of a cone or pyramid pair.
enum class Variant : int { Standard = 0, Tilde = 1, Breve = 2 };

/// diag(2^j, 2^{j/2}, ...) with the 2^j entry on the variant's axis.
Matrix scaling_matrix(int dim, Variant variant, int j);
/// Unit triangular shear: the variant's row holds k in its off-diagonal slots.
Matrix shear_matrix(int dim, Variant variant, std::array<int, 2> k);
/// diag(c2, ..., c1, ..., c2) with c1 on the variant's axis.
Matrix sampling_matrix(int dim, Variant variant, double c1, double c2);
/// ceil(2^{j/2}).
int shear_range(int j);

/// region 0 is the scaling part; region r >= 1 is the cone or pyramid pair
/// whose wavelet axis is r - 1. For scaling indices j = 0 and k = 0. `m` is
/// the integer coordinate of the translation on the band's sampling lattice.
struct ShearletIndex {
  int region = 0;
  int j = 0;
  std::array<int, 2> k{0, 0};
  std::array<std::int64_t, 3> m{0, 0, 0};

  bool operator==(const ShearletIndex&) const = default;
};

/// Frequency regions: 0 is the central box ||xi||_inf < 1; 2D cones are
/// 1..4 (right, top, left, bottom); 3D pyramids are 1..6 (+x1, +x2, +x3,
/// -x1, -x2, -x3). Points on a seam go to the pair with the lowest axis,
/// so the diagonal belongs to the horizontal cone pair.
int frequency_region(int dim, const Vec3& point);
std::string region_label(int dim, int region);

/// Plain parameters of a system. `extent` is the raster size per axis; the
/// digital domain is the periodic box [0, extent * spacing)^dim.
struct SystemSpec {
  int dim = 2;
  int J_max = 0;  // 0 selects the default for the extent
  double c1 = 1.0;
  double c2 = 1.0;
  GeneratorKind kind = GeneratorKind::CompactSeparable;
  int K = 39;
  int L = 19;
  bool relaxed = false;
  std::size_t extent = 64;

  /// Throws ConstraintError on invalid parameters.
  void validate() const;
  std::string to_config() const;
  static SystemSpec from_config(const std::string& text);
};

/// One (region, j, k) band of a digital system.
///
/// The element spectra are norm * psi_r(BinvT xi) * exp(-2 pi i xi . x),
/// where BinvT is (S A)^{-T} and x is a lattice point. Lattice points are
/// x = (p * decimation) * spacing for integer p in [0, lattice).
struct Band {
  int region = 0;
  int j = 0;
  std::array<int, 2> k{0, 0};
  Matrix BinvT;
  double norm = 1.0;                        // 2^{-3j/4} (2D), 2^{-j} (3D)
  double volume = 1.0;                      // continuum lattice cell volume
  std::array<std::size_t, 3> decimation{1, 1, 1};
  std::array<std::size_t, 3> lattice{1, 1, 1};
  double weight = 1.0;                      // sqrt(prod(decimation) h^d / volume)
  std::size_t offset = 0;                   // into the flat coefficient vector
  std::size_t size = 0;                     // prod(lattice)
};

/// A constructed system: generators plus the digital band layout.
class ShearletSystem {
 public:
  explicit ShearletSystem(const SystemSpec& spec);

  const SystemSpec& spec() const { return spec_; }
  const GeneratorSet& generators() const { return *generators_; }
  std::shared_ptr<const ScalingTable> scaling_table() const { return table_; }
  int dim() const { return spec_.dim; }
  int J_max() const { return J_max_; }
  std::size_t extent() const { return spec_.extent; }
  /// Pixel spacing in generator units.
  double spacing() const { return spacing_; }
  /// Largest raster frequency in generator units, 1 / (2 spacing).
  double nyquist() const { return 0.5 / spacing_; }
  double sampling_det() const;
  const std::vector<Band>& bands() const { return bands_; }
  std::size_t coefficient_count() const { return total_; }

  /// Band position of a flat coefficient index and its ShearletIndex.
  std::size_t band_of(std::size_t flat) const;
  ShearletIndex index_of(std::size_t flat) const;
  /// Flat position of an index; throws ConsistencyError if absent.
  std::size_t flat_of(const ShearletIndex& idx) const;

  /// Exact generator value of a band at eta (wavelet regions include the
  /// cone truncation of band-limited systems, evaluated at xi).
  cplx band_generator(const Band& band, const Vec3& xi) const;

 private:
  SystemSpec spec_;
  int J_max_ = 0;
  double spacing_ = 1.0;
  std::shared_ptr<const GeneratorSet> generators_;
  std::shared_ptr<const ScalingTable> table_;
  std::vector<Band> bands_;
  std::size_t total_ = 0;
};

/// Default number of scales, log2(extent). The finest band sits at the raster
/// Nyquist frequency, so the periodic domain spans 1 / nyquist_argument
/// generator units (8 for compact generators, 4 for band-limited ones).
int default_J_max(int dim, std::size_t extent, GeneratorKind kind);

/// Cached factorization shared by every system with the same orders.
std::shared_ptr<const FilterPair> cached_filters(int K, int L, bool relaxed);

/// All indices in deterministic order (region, j, k, then m).
std::vector<ShearletIndex> enumerate_indices(const ShearletSystem& system);

}  // namespace shearlab
