// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "shearlab/errors.hpp"

namespace shearlab {

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::identity(int dim) {
  Matrix m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
  Matrix r;
  r.dim = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int l = 0; l < dim; ++l) s += (*this)(i, l) * o(l, j);
      r(i, j) = s;
    }
  return r;
}

Vec3 Matrix::operator*(const Vec3& v) const {
  Vec3 r{0, 0, 0};
  for (int i = 0; i < dim; ++i)
    for (int l = 0; l < dim; ++l) r[i] += (*this)(i, l) * v[l];
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r;
  r.dim = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Matrix::determinant() const {
  const Matrix& m = *this;
  if (dim == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Matrix Matrix::inverse() const {
  const Matrix& m = *this;
  const double det = determinant();
  Matrix r;
  r.dim = dim;
  if (dim == 2) {
    r(0, 0) = m(1, 1) / det;
    r(0, 1) = -m(0, 1) / det;
    r(1, 0) = -m(1, 0) / det;
    r(1, 1) = m(0, 0) / det;
    return r;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
      r(i, j) = (m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1)) / det;
    }
  return r;
}

// ---------------------------------------------------------------------------
// Index geometry

namespace {

void check_variant(int dim, Variant v) {
  if (dim != 2 && dim != 3) throw ConstraintError("dimension must be 2 or 3");
  if (static_cast<int>(v) >= dim) throw ConstraintError("variant not available in this dimension");
}

}  // namespace

Matrix scaling_matrix(int dim, Variant variant, int j) {
  check_variant(dim, variant);
  if (j < 0) throw ConstraintError("scale must be non-negative");
  Matrix m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m(i, i) = std::exp2(i == static_cast<int>(variant) ? j : 0.5 * j);
  return m;
}

Matrix shear_matrix(int dim, Variant variant, std::array<int, 2> k) {
  check_variant(dim, variant);
  Matrix m = Matrix::identity(dim);
  const int row = static_cast<int>(variant);
  int slot = 0;
  for (int c = 0; c < dim; ++c)
    if (c != row) m(row, c) = k[slot++];
  return m;
}

Matrix sampling_matrix(int dim, Variant variant, double c1, double c2) {
  check_variant(dim, variant);
  Matrix m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m(i, i) = i == static_cast<int>(variant) ? c1 : c2;
  return m;
}

int shear_range(int j) {
  if (j < 0) throw ConstraintError("scale must be non-negative");
  // Exact ceil(2^{j/2}) without relying on floating rounding at even j.
  if (j % 2 == 0) return 1 << (j / 2);
  return static_cast<int>(std::ceil(std::exp2(0.5 * j)));
}

int frequency_region(int dim, const Vec3& p) {
  if (dim != 2 && dim != 3) throw ConstraintError("dimension must be 2 or 3");
  int axis = 0;
  double best = std::abs(p[0]);
  for (int a = 1; a < dim; ++a)
    if (std::abs(p[a]) > best) {
      best = std::abs(p[a]);
      axis = a;
    }
  if (best < 1.0) return 0;
  const bool positive = p[axis] > 0.0;
  if (dim == 2) {
    if (axis == 0) return positive ? 1 : 3;
    return positive ? 2 : 4;
  }
  return positive ? axis + 1 : axis + 4;
}

std::string region_label(int dim, int region) {
  if (region == 0) return "R";
  return (dim == 2 ? "C" : "P") + std::to_string(region);
}

// ---------------------------------------------------------------------------
// SystemSpec

void SystemSpec::validate() const {
  if (dim != 2 && dim != 3) throw ConstraintError("dim must be 2 or 3");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConstraintError("sampling constants must be positive");
  if (kind == GeneratorKind::CompactSeparable) {
    validate_orders(K, L, relaxed);
    if (dim == 2 && c2 > c1) throw ConstraintError("compact 2D systems require c2 <= c1");
  }
  if (kind == GeneratorKind::BandLimitedClassical && dim != 2)
    throw ConstraintError("the band-limited reference system is two-dimensional");
  if (extent < 8 || (extent & (extent - 1)) != 0)
    throw ConstraintError("extent must be a power of two and at least 8");
  if (J_max < 0 || J_max > 30) throw ConstraintError("J_max must lie in [0, 30]");
}

std::string SystemSpec::to_config() const {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << dim << "\n"
     << "J_max=" << J_max << "\n"
     << "c1=" << c1 << "\n"
     << "c2=" << c2 << "\n"
     << "generator=" << to_string(kind) << "\n"
     << "K=" << K << "\n"
     << "L=" << L << "\n"
     << "relaxed=" << (relaxed ? "true" : "false") << "\n"
     << "domain=" << extent << "\n";
  return os.str();
}

SystemSpec SystemSpec::from_config(const std::string& text) {
  SystemSpec s;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "dim") s.dim = std::stoi(val);
      else if (key == "J_max") s.J_max = std::stoi(val);
      else if (key == "c1") s.c1 = std::stod(val);
      else if (key == "c2") s.c2 = std::stod(val);
      else if (key == "K") s.K = std::stoi(val);
      else if (key == "L") s.L = std::stoi(val);
      else if (key == "domain" || key == "extent") s.extent = std::stoul(val);
      else if (key == "relaxed") s.relaxed = (val == "true" || val == "1");
      else if (key == "generator") {
        if (val == "compact") s.kind = GeneratorKind::CompactSeparable;
        else if (val == "classical") s.kind = GeneratorKind::BandLimitedClassical;
        else if (val == "zero") s.kind = GeneratorKind::Zero;
        else throw FormatError("unknown generator kind '" + val + "'");
      } else {
        throw FormatError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw FormatError("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// ShearletSystem

std::shared_ptr<const FilterPair> cached_filters(int K, int L, bool relaxed) {
  static std::mutex mu;
  static std::map<std::tuple<int, int>, std::shared_ptr<const FilterPair>> cache;
  validate_orders(K, L, relaxed);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{K, L}];
  if (!slot) slot = std::make_shared<const FilterPair>(spectral_factorize(K, L, true));
  return slot;
}

namespace {

std::shared_ptr<const ScalingTable> cached_table(const std::shared_ptr<const FilterPair>& pair) {
  static std::mutex mu;
  static std::map<const FilterPair*, std::shared_ptr<const ScalingTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[pair.get()];
  if (!slot) slot = std::make_shared<const ScalingTable>(pair);
  return slot;
}

std::shared_ptr<const GeneratorSet> cached_set(const SystemSpec& spec) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const GeneratorSet>> cache;
  const auto key = std::make_tuple(spec.dim, static_cast<int>(spec.kind), spec.K, spec.L);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::shared_ptr<const GeneratorSet> set;
  switch (spec.kind) {
    case GeneratorKind::CompactSeparable:
      set = std::make_shared<const GeneratorSet>(
          make_compact_set(cached_filters(spec.K, spec.L, spec.relaxed), spec.dim));
      break;
    case GeneratorKind::BandLimitedClassical:
      set = std::make_shared<const GeneratorSet>(make_classical_set());
      break;
    case GeneratorKind::Zero:
      set = std::make_shared<const GeneratorSet>(make_zero_set(spec.dim));
      break;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = set;
  return set;
}

std::size_t pow2_floor(double s, std::size_t cap) {
  std::size_t d = 1;
  while (2 * d <= cap && static_cast<double>(2 * d) <= s * (1.0 + 1e-9)) d *= 2;
  return d;
}

double nyquist_argument(GeneratorKind kind) {
  return kind == GeneratorKind::BandLimitedClassical ? 0.25 : 0.125;
}

}  // namespace

int default_J_max(int dim, std::size_t extent, GeneratorKind kind) {
  (void)dim;
  (void)kind;
  return std::max(1, static_cast<int>(std::lround(std::log2(static_cast<double>(extent)))));
}

ShearletSystem::ShearletSystem(const SystemSpec& spec) : spec_(spec) {
  spec_.validate();
  J_max_ = spec_.J_max > 0 ? spec_.J_max : default_J_max(spec_.dim, spec_.extent, spec_.kind);
  spec_.J_max = J_max_;
  generators_ = cached_set(spec_);
  if (generators_->phi.filters) table_ = cached_table(generators_->phi.filters);

  const int d = spec_.dim;
  const double xi_n = std::ldexp(nyquist_argument(spec_.kind), J_max_ - 1);
  spacing_ = 0.5 / xi_n;
  const std::size_t n = spec_.extent;

  auto finish = [&](Band& b, const std::array<double, 3>& lattice_spacing) {
    double dec = 1.0;
    b.size = 1;
    for (int a = 0; a < d; ++a) {
      b.decimation[a] = pow2_floor(lattice_spacing[a] / spacing_, n);
      b.lattice[a] = n / b.decimation[a];
      dec *= static_cast<double>(b.decimation[a]);
      b.size *= b.lattice[a];
    }
    b.weight = std::sqrt(dec * std::pow(spacing_, d) / b.volume);
    b.offset = total_;
    total_ += b.size;
    bands_.push_back(b);
  };

  Band scaling;
  scaling.BinvT = Matrix::identity(d);
  scaling.volume = std::pow(spec_.c1, d);
  finish(scaling, {spec_.c1, spec_.c1, spec_.c1});

  for (int r = 1; r <= d; ++r) {
    const auto variant = static_cast<Variant>(r - 1);
    for (int j = 0; j < J_max_; ++j) {
      const int kr = shear_range(j);
      const int k2max = d == 3 ? kr : 0;
      for (int k1 = -kr; k1 <= kr; ++k1)
        for (int k2 = -k2max; k2 <= k2max; ++k2) {
          Band b;
          b.region = r;
          b.j = j;
          b.k = {k1, k2};
          const Matrix B = shear_matrix(d, variant, b.k) * scaling_matrix(d, variant, j);
          b.BinvT = B.inverse().transpose();
          b.norm = d == 2 ? std::exp2(-0.75 * j) : std::exp2(-1.0 * j);
          b.volume = std::abs(sampling_matrix(d, variant, spec_.c1, spec_.c2).determinant() /
                              B.determinant());
          std::array<double, 3> ls{};
          for (int a = 0; a < d; ++a)
            ls[a] = a == r - 1 ? std::exp2(-j) * spec_.c1 : std::exp2(-0.5 * j) * spec_.c2;
          // A band-limited finest band reaches the Nyquist bins, where the
          // alias-averaged spectrum holds both signs of the sheared support,
          // about 2k bins apart. Only the full raster grid keeps those apart.
          if (spec_.kind == GeneratorKind::BandLimitedClassical && j == J_max_ - 1)
            for (int a = 0; a < d; ++a)
              if (a != r - 1) ls[a] = spacing_;
          finish(b, ls);
        }
    }
  }
}

double ShearletSystem::sampling_det() const {
  return spec_.dim == 2 ? spec_.c1 * spec_.c2 : spec_.c1 * spec_.c2 * spec_.c2;
}

std::size_t ShearletSystem::band_of(std::size_t flat) const {
  if (flat >= total_) throw ConsistencyError("coefficient position outside the system");
  auto it = std::upper_bound(bands_.begin(), bands_.end(), flat,
                             [](std::size_t f, const Band& b) { return f < b.offset; });
  return static_cast<std::size_t>(it - bands_.begin()) - 1;
}

ShearletIndex ShearletSystem::index_of(std::size_t flat) const {
  const Band& b = bands_[band_of(flat)];
  ShearletIndex idx;
  idx.region = b.region;
  idx.j = b.j;
  idx.k = b.k;
  std::size_t rem = flat - b.offset;
  for (int a = spec_.dim - 1; a >= 0; --a) {
    idx.m[a] = static_cast<std::int64_t>(rem % b.lattice[a]);
    rem /= b.lattice[a];
  }
  return idx;
}

std::size_t ShearletSystem::flat_of(const ShearletIndex& idx) const {
  for (const Band& b : bands_) {
    if (b.region != idx.region || b.j != idx.j || b.k != idx.k) continue;
    std::size_t pos = 0;
    for (int a = 0; a < spec_.dim; ++a) {
      if (idx.m[a] < 0 || static_cast<std::size_t>(idx.m[a]) >= b.lattice[a])
        throw ConsistencyError("translation outside the band lattice");
      pos = pos * b.lattice[a] + static_cast<std::size_t>(idx.m[a]);
    }
    return b.offset + pos;
  }
  throw ConsistencyError("index does not belong to the system");
}

cplx ShearletSystem::band_generator(const Band& band, const Vec3& xi) const {
  const GeneratorSet& g = *generators_;
  if (band.region == 0) return g.phi(xi);
  const int axis = band.region - 1;
  if (g.kind == GeneratorKind::BandLimitedClassical) {
    // Cone truncation; the diagonal seam belongs to the horizontal pair.
    const bool horizontal = std::abs(xi[1]) <= std::abs(xi[0]);
    if (horizontal != (axis == 0)) return 0.0;
  }
  return g.psi[static_cast<std::size_t>(axis)](band.BinvT * xi);
}

std::vector<ShearletIndex> enumerate_indices(const ShearletSystem& system) {
  std::vector<ShearletIndex> out;
  out.reserve(system.coefficient_count());
  const int d = system.dim();
  for (const Band& b : system.bands()) {
    ShearletIndex idx;
    idx.region = b.region;
    idx.j = b.j;
    idx.k = b.k;
    std::array<std::size_t, 3> p{0, 0, 0};
    for (std::size_t n = 0; n < b.size; ++n) {
      for (int a = 0; a < d; ++a) idx.m[a] = static_cast<std::int64_t>(p[a]);
      out.push_back(idx);
      for (int a = d - 1; a >= 0; --a) {
        if (++p[a] < b.lattice[a]) break;
        p[a] = 0;
      }
    }
  }
  return out;
}

}  // namespace shearlab
