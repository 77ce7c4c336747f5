// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/transform.hpp"

#include "parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <queue>
#include <thread>

#include "shearlab/errors.hpp"

namespace shearlab {

namespace {

std::atomic<int> g_threads{1};

// ---------------------------------------------------------------------------
// FFTW plumbing. Buffers always come from fftw_malloc so that plans made on
// one buffer can run on any other through the new-array interface.

template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p && n) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const { return true; }
};

using RBuf = std::vector<double, FftwAllocator<double>>;
using CBuf = std::vector<cplx, FftwAllocator<cplx>>;

using Dims = std::array<std::size_t, 3>;

std::size_t real_size(const Dims& n, int d) {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= n[a];
  return s;
}

std::size_t half_size(const Dims& n, int d) {
  std::size_t s = 1;
  for (int a = 0; a < d - 1; ++a) s *= n[a];
  return s * (n[d - 1] / 2 + 1);
}

class FftPlan {
 public:
  FftPlan(const Dims& n, int d) {
    int dims[3];
    for (int a = 0; a < d; ++a) dims[a] = static_cast<int>(n[a]);
    RBuf r(real_size(n, d));
    CBuf c(half_size(n, d));
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    forward_ = fftw_plan_dft_r2c(d, dims, r.data(), cp, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r(d, dims, cp, r.data(), FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw Error("FFTW planning failed");
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(double* in, cplx* out) const {
    fftw_execute_dft_r2c(forward_, in, reinterpret_cast<fftw_complex*>(out));
  }
  // Destroys `in`.
  void backward(cplx* in, double* out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

std::shared_ptr<const FftPlan> plan_for(const Dims& n, int d) {
  static std::mutex mu;  // the FFTW planner is not thread safe
  static std::map<std::pair<Dims, int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, d}];
  if (!slot) slot = std::make_shared<const FftPlan>(n, d);
  return slot;
}

using detail::parallel_items;

// Alias map between the half spectrum of an n-grid and that of the
// decimated m-grid (m = n / decimation).
struct AliasMap {
  Dims m{1, 1, 1};
  std::size_t fan = 1;                 // prod(decimation)
  std::vector<std::uint32_t> fold_src;  // m-half size * fan
  std::vector<std::uint8_t> fold_conj;
  std::vector<std::uint32_t> tile_src;  // n-half size
  std::vector<std::uint8_t> tile_conj;
};

// Half-grid index of a full-grid coordinate, with the conjugation flag.
std::pair<std::size_t, bool> half_index(const Dims& n, int d, std::array<std::size_t, 3> q) {
  const std::size_t last = n[d - 1];
  bool conj = false;
  if (q[d - 1] > last / 2) {
    conj = true;
    for (int a = 0; a < d; ++a) q[a] = (n[a] - q[a]) % n[a];
  }
  std::size_t idx = 0;
  for (int a = 0; a < d - 1; ++a) idx = idx * n[a] + q[a];
  idx = idx * (last / 2 + 1) + q[d - 1];
  return {idx, conj};
}

// Iterate the coordinates of a half grid in storage order.
template <class F>
void for_half(const Dims& n, int d, F&& f) {
  Dims len = n;
  len[d - 1] = n[d - 1] / 2 + 1;
  std::array<std::size_t, 3> q{0, 0, 0};
  const std::size_t total = half_size(n, d);
  for (std::size_t i = 0; i < total; ++i) {
    f(i, q);
    for (int a = d - 1; a >= 0; --a) {
      if (++q[a] < len[a]) break;
      q[a] = 0;
    }
  }
}

AliasMap make_alias_map(const Dims& n, const Dims& dec, int d) {
  AliasMap map;
  for (int a = 0; a < d; ++a) {
    map.m[a] = n[a] / dec[a];
    map.fan *= dec[a];
  }
  const std::size_t mh = half_size(map.m, d);
  map.fold_src.resize(mh * map.fan);
  map.fold_conj.resize(mh * map.fan);
  for_half(map.m, d, [&](std::size_t i, const std::array<std::size_t, 3>& p) {
    for (std::size_t s = 0; s < map.fan; ++s) {
      std::size_t rem = s;
      std::array<std::size_t, 3> q{0, 0, 0};
      for (int a = d - 1; a >= 0; --a) {
        q[a] = p[a] + map.m[a] * (rem % dec[a]);
        rem /= dec[a];
      }
      const auto [idx, conj] = half_index(n, d, q);
      map.fold_src[i * map.fan + s] = static_cast<std::uint32_t>(idx);
      map.fold_conj[i * map.fan + s] = conj;
    }
  });
  map.tile_src.resize(half_size(n, d));
  map.tile_conj.resize(half_size(n, d));
  for_half(n, d, [&](std::size_t i, const std::array<std::size_t, 3>& q) {
    std::array<std::size_t, 3> p{0, 0, 0};
    for (int a = 0; a < d; ++a) p[a] = q[a] % map.m[a];
    const auto [idx, conj] = half_index(map.m, d, p);
    map.tile_src[i] = static_cast<std::uint32_t>(idx);
    map.tile_conj[i] = conj;
  });
  return map;
}

bool undecimated(const Band& b, int d) {
  for (int a = 0; a < d; ++a)
    if (b.decimation[a] != 1) return false;
  return true;
}

}  // namespace

void set_num_threads(int n) { g_threads = std::max(1, n); }
int num_threads() { return g_threads; }

// ---------------------------------------------------------------------------
// Raster and coefficient containers

Raster::Raster(int d, std::size_t n) : dim(d) {
  extents = {n, n, d == 3 ? n : 1};
  spacing = n ? 1.0 / static_cast<double>(n) : 0.0;
  data.assign(real_size(extents, d), 0.0);
}

void Raster::validate() const {
  if (dim != 2 && dim != 3) throw ShapeError("raster dimension must be 2 or 3");
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    const std::size_t e = extents[a];
    if (e < 8 || (e & (e - 1)) != 0) throw ShapeError("raster extents must be powers of two >= 8");
    total *= e;
  }
  if (data.size() != total) throw ShapeError("raster data size does not match its extents");
  for (double v : data)
    if (!std::isfinite(v)) throw ShapeError("raster contains non-finite values");
}

std::vector<double> CoefficientSet::to_dense() const {
  if (dense) return values;
  std::vector<double> out(total, 0.0);
  for (std::size_t i = 0; i < positions.size(); ++i) out[positions[i]] = values[i];
  return out;
}

// ---------------------------------------------------------------------------
// Engine

struct ShearletTransform::Impl {
  const ShearletSystem* sys = nullptr;
  int d = 2;
  std::size_t n = 0;
  Dims dims{1, 1, 1};
  std::size_t real_total = 0;
  std::size_t half_total = 0;
  double h = 1.0;
  double domain_volume = 1.0;  // (n h)^d
  std::shared_ptr<const FftPlan> plan;
  int threads = 1;

  std::vector<double> freq;  // generator-unit frequency of each index, n/2 -> -nyquist

  std::mutex map_mu;
  std::map<Dims, std::shared_ptr<const AliasMap>> maps;

  std::mutex cache_mu;
  std::vector<std::shared_ptr<const std::vector<cplx>>> spectra;
  std::size_t cache_budget = 0;
  std::size_t cache_used = 0;

  std::once_flag diag_once;
  std::vector<double> diag_full;    // sum over all bands |D|^2 / V
  std::vector<double> diag_direct;  // undecimated bands only

  std::shared_ptr<const AliasMap> alias(const Band& b) {
    std::lock_guard<std::mutex> lock(map_mu);
    auto& slot = maps[b.decimation];
    if (!slot) slot = std::make_shared<const AliasMap>(make_alias_map(dims, b.decimation, d));
    return slot;
  }

  // Table-based value of the band's undigitized element spectrum at xi.
  cplx point_value(const Band& b, const Vec3& xi) const {
    const GeneratorSet& g = sys->generators();
    if (g.kind != GeneratorKind::CompactSeparable) return b.norm * sys->band_generator(b, xi);
    const ScalingTable& T = *sys->scaling_table();
    if (b.region == 0) {
      cplx v = 1.0;
      for (int a = 0; a < d; ++a) v *= T(xi[a]);
      return v;
    }
    const int axis = b.region - 1;
    const Vec3 eta = b.BinvT * xi;
    cplx v = g.phi.filters->m1(4.0 * eta[axis]) * T(eta[axis]);
    for (int a = 0; a < d; ++a)
      if (a != axis) v *= T(2.0 * eta[a]);
    return b.norm * v;
  }

  // Nyquist rule: frequencies with an index at n/2 stand for both signs.
  template <class Eval>
  cplx alias_average(const std::array<std::size_t, 3>& q, Eval&& eval) const {
    const double nyq = 0.5 / h;
    std::array<int, 3> nyq_axes{};
    int count = 0;
    Vec3 xi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      xi[a] = freq[q[a]];
      if (q[a] == n / 2) nyq_axes[count++] = a;
    }
    if (count == 0) return eval(xi);
    cplx mean = 0.0;
    double energy = 0.0;
    const int combos = 1 << count;
    for (int s = 0; s < combos; ++s) {
      Vec3 x = xi;
      for (int c = 0; c < count; ++c) x[nyq_axes[c]] = (s >> c & 1) ? nyq : -nyq;
      const cplx v = eval(x);
      mean += v;
      energy += std::norm(v);
    }
    mean /= static_cast<double>(combos);
    const double mag = std::sqrt(energy / combos);
    const double am = std::abs(mean);
    if (am < 1e-300) return mag;
    return mag * mean / am;
  }

  std::vector<cplx> compute_spectrum(const Band& b) const {
    std::vector<cplx> D(half_total);
    const GeneratorSet& g = sys->generators();
    const std::size_t nh = n / 2 + 1;
    Dims len = dims;
    len[d - 1] = nh;
    if (g.kind == GeneratorKind::Zero) return D;
    if (g.kind == GeneratorKind::BandLimitedClassical) {
      for_half(dims, d, [&](std::size_t i, const std::array<std::size_t, 3>& q) {
        D[i] = alias_average(q, [&](const Vec3& x) { return point_value(b, x); });
      });
      return D;
    }
    const ScalingTable& T = *sys->scaling_table();
    if (b.region == 0) {
      std::vector<cplx> per(n);
      for (std::size_t q = 0; q < n; ++q) per[q] = T(freq[q]);
      for_half(dims, d, [&](std::size_t i, const std::array<std::size_t, 3>& q) {
        cplx v = 1.0;
        for (int a = 0; a < d; ++a) v *= per[q[a]];
        D[i] = v;
      });
    } else {
      // Separable fast path: eta_axis depends on xi_axis only and every
      // other eta_b on (xi_axis, xi_b).
      const int axis = b.region - 1;
      const double s_axis = b.BinvT(axis, axis);
      std::vector<cplx> u(len[axis]);
      for (std::size_t q = 0; q < len[axis]; ++q) {
        const double t = s_axis * freq[q];
        u[q] = b.norm * g.phi.filters->m1(4.0 * t) * T(t);
      }
      std::array<std::vector<cplx>, 3> v;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        v[a].resize(len[axis] * len[a]);
        const double cb = b.BinvT(a, a), ca = b.BinvT(a, axis);
        for (std::size_t qa = 0; qa < len[axis]; ++qa) {
          if (u[qa] == 0.0) continue;
          for (std::size_t qb = 0; qb < len[a]; ++qb)
            v[a][qa * len[a] + qb] = T(2.0 * (cb * freq[qb] + ca * freq[qa]));
        }
      }
      for_half(dims, d, [&](std::size_t i, const std::array<std::size_t, 3>& q) {
        const std::size_t qa = q[axis];
        cplx val = u[qa];
        if (val != 0.0)
          for (int a = 0; a < d; ++a)
            if (a != axis) val *= v[a][qa * len[a] + q[a]];
        D[i] = val;
      });
    }
    // Nyquist fix-up.
    for_half(dims, d, [&](std::size_t i, const std::array<std::size_t, 3>& q) {
      bool nyq = false;
      for (int a = 0; a < d; ++a) nyq = nyq || q[a] == n / 2;
      if (nyq) D[i] = alias_average(q, [&](const Vec3& x) { return point_value(b, x); });
    });
    return D;
  }

  std::shared_ptr<const std::vector<cplx>> spectrum(std::size_t band) {
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      if (spectra[band]) return spectra[band];
    }
    auto s = std::make_shared<const std::vector<cplx>>(compute_spectrum(sys->bands()[band]));
    std::lock_guard<std::mutex> lock(cache_mu);
    const std::size_t bytes = s->size() * sizeof(cplx);
    if (!spectra[band] && cache_used + bytes <= cache_budget) {
      spectra[band] = s;
      cache_used += bytes;
    }
    return s;
  }

  void ensure_diag() {
    std::call_once(diag_once, [&] {
      const auto& bands = sys->bands();
      std::vector<std::vector<double>> full(threads, std::vector<double>(half_total, 0.0));
      std::vector<std::vector<double>> direct(threads, std::vector<double>(half_total, 0.0));
      parallel_items(bands.size(), threads, [&](int t, std::size_t bi) {
        const auto D = spectrum(bi);
        const double inv_v = 1.0 / bands[bi].volume;
        const bool und = undecimated(bands[bi], d);
        for (std::size_t i = 0; i < half_total; ++i) {
          const double e = std::norm((*D)[i]) * inv_v;
          full[t][i] += e;
          if (und) direct[t][i] += e;
        }
      });
      diag_full = full[0];
      diag_direct = direct[0];
      for (int t = 1; t < threads; ++t)
        for (std::size_t i = 0; i < half_total; ++i) {
          diag_full[i] += full[t][i];
          diag_direct[i] += direct[t][i];
        }
    });
  }

  CBuf forward(const Raster& f) const {
    RBuf in(f.data.begin(), f.data.end());
    CBuf out(half_total);
    plan->forward(in.data(), out.data());
    return out;
  }

  // Raster from a forward-normalized half spectrum: backward / n^d.
  Raster backward(CBuf spec) const {
    RBuf out(real_total);
    plan->backward(spec.data(), out.data());
    Raster r(d, n);
    const double s = 1.0 / static_cast<double>(real_total);
    for (std::size_t i = 0; i < real_total; ++i) r.data[i] = out[i] * s;
    return r;
  }

  // (S f)^ = sum_bands (1/V) D tile(fold(F conj D)).
  CBuf apply_frame(const CBuf& F) {
    ensure_diag();
    const auto& bands = sys->bands();
    std::vector<CBuf> acc(threads, CBuf(half_total, cplx(0.0)));
    parallel_items(bands.size(), threads, [&](int t, std::size_t bi) {
      const Band& b = bands[bi];
      if (undecimated(b, d)) return;
      const auto Dp = spectrum(bi);
      const auto& D = *Dp;
      const auto map = alias(b);
      const std::size_t mh = half_size(map->m, d);
      std::vector<cplx> G(half_total), folded(mh, cplx(0.0));
      for (std::size_t i = 0; i < half_total; ++i) G[i] = F[i] * std::conj(D[i]);
      for (std::size_t p = 0; p < mh; ++p) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < map->fan; ++k) {
          const cplx g = G[map->fold_src[p * map->fan + k]];
          s += map->fold_conj[p * map->fan + k] ? std::conj(g) : g;
        }
        folded[p] = s;
      }
      const double inv_v = 1.0 / b.volume;
      auto& out = acc[t];
      for (std::size_t i = 0; i < half_total; ++i) {
        const cplx c = folded[map->tile_src[i]];
        out[i] += inv_v * D[i] * (map->tile_conj[i] ? std::conj(c) : c);
      }
    });
    CBuf Y(half_total);
    for (std::size_t i = 0; i < half_total; ++i) {
      cplx s = diag_direct[i] * F[i];
      for (int t = 0; t < threads; ++t) s += acc[t][i];
      Y[i] = s;
    }
    return Y;
  }

  // Coefficients of one band from the input half spectrum F.
  void analyze_band(std::size_t bi, const CBuf& F, double* out) {
    const Band& b = sys->bands()[bi];
    const auto Dp = spectrum(bi);
    const auto& D = *Dp;
    const double scale = b.weight / static_cast<double>(real_total);
    if (undecimated(b, d)) {
      CBuf G(half_total);
      for (std::size_t i = 0; i < half_total; ++i) G[i] = F[i] * std::conj(D[i]);
      RBuf r(real_total);
      plan->backward(G.data(), r.data());
      for (std::size_t i = 0; i < real_total; ++i) out[i] = scale * r[i];
      return;
    }
    const auto map = alias(b);
    const std::size_t mh = half_size(map->m, d);
    CBuf folded(mh);
    for (std::size_t p = 0; p < mh; ++p) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < map->fan; ++k) {
        const std::uint32_t src = map->fold_src[p * map->fan + k];
        const cplx g = F[src] * std::conj(D[src]);
        s += map->fold_conj[p * map->fan + k] ? std::conj(g) : g;
      }
      folded[p] = s;
    }
    RBuf r(b.size);
    plan_for(map->m, d)->backward(folded.data(), r.data());
    for (std::size_t i = 0; i < b.size; ++i) out[i] = scale * r[i];
  }

  // Adds (w / L^d) D tile(r2c_M(c)) into acc.
  void synthesize_band(std::size_t bi, const double* coeffs, CBuf& acc) {
    const Band& b = sys->bands()[bi];
    const auto Dp = spectrum(bi);
    const auto& D = *Dp;
    const double scale = b.weight / domain_volume;
    if (undecimated(b, d)) {
      RBuf r(coeffs, coeffs + real_total);
      CBuf C(half_total);
      plan->forward(r.data(), C.data());
      for (std::size_t i = 0; i < half_total; ++i) acc[i] += scale * D[i] * C[i];
      return;
    }
    const auto map = alias(b);
    RBuf r(coeffs, coeffs + b.size);
    CBuf C(half_size(map->m, d));
    plan_for(map->m, d)->forward(r.data(), C.data());
    for (std::size_t i = 0; i < half_total; ++i) {
      const cplx c = C[map->tile_src[i]];
      acc[i] += scale * D[i] * (map->tile_conj[i] ? std::conj(c) : c);
    }
  }
};

ShearletTransform::ShearletTransform(const SystemSpec& spec, TransformOptions options)
    : system_(std::make_shared<const ShearletSystem>(spec)), options_(options),
      impl_(std::make_shared<Impl>()) {
  Impl& m = *impl_;
  m.sys = system_.get();
  m.d = system_->dim();
  m.n = system_->extent();
  m.dims = {m.n, m.n, m.d == 3 ? m.n : 1};
  m.real_total = real_size(m.dims, m.d);
  m.half_total = half_size(m.dims, m.d);
  m.h = system_->spacing();
  m.domain_volume = std::pow(static_cast<double>(m.n) * m.h, m.d);
  m.plan = plan_for(m.dims, m.d);
  m.threads = options.threads > 0 ? options.threads : num_threads();
  m.freq.resize(m.n);
  for (std::size_t q = 0; q < m.n; ++q) {
    const double s = q < m.n / 2 ? static_cast<double>(q) : static_cast<double>(q) - static_cast<double>(m.n);
    m.freq[q] = s / (static_cast<double>(m.n) * m.h);
  }
  m.spectra.resize(system_->bands().size());
  m.cache_budget = options.cache_bytes;
  if (m.half_total > std::numeric_limits<std::uint32_t>::max())
    throw ConstraintError("raster too large for the alias index maps");
}

namespace {

void check_raster(const Raster& f, const ShearletSystem& sys) {
  f.validate();
  if (f.dim != sys.dim()) throw ShapeError("raster dimension does not match the system");
  for (int a = 0; a < f.dim; ++a)
    if (f.extents[a] != sys.extent()) throw ShapeError("raster extent does not match the system domain");
}

void check_coefficients(const CoefficientSet& c, const ShearletSystem& sys) {
  if (c.total != sys.coefficient_count() || c.spec.to_config() != sys.spec().to_config())
    throw ConsistencyError("coefficients belong to a different system");
  if (c.dense && c.values.size() != c.total) throw ConsistencyError("dense coefficient size mismatch");
  if (!c.dense) {
    if (c.positions.size() != c.values.size()) throw ConsistencyError("sparse coefficient size mismatch");
    for (auto p : c.positions)
      if (p >= c.total) throw ConsistencyError("coefficient position outside the system");
  }
}

}  // namespace

Raster ShearletTransform::zeros() const { return Raster(system_->dim(), system_->extent()); }

double ShearletTransform::inner(const Raster& f, const Raster& g) const {
  if (f.data.size() != g.data.size()) throw ShapeError("raster sizes differ");
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.data.size(); ++i) s += static_cast<long double>(f.data[i]) * g.data[i];
  return static_cast<double>(s) * std::pow(system_->spacing(), system_->dim());
}

CoefficientSet ShearletTransform::analyze(const Raster& f) const {
  check_raster(f, *system_);
  Impl& m = *impl_;
  CoefficientSet c;
  c.spec = system_->spec();
  c.total = system_->coefficient_count();
  c.values.assign(c.total, 0.0);
  const CBuf F = m.forward(f);
  const auto& bands = system_->bands();
  parallel_items(bands.size(), m.threads,
                 [&](int, std::size_t bi) { m.analyze_band(bi, F, c.values.data() + bands[bi].offset); });
  return c;
}

Raster ShearletTransform::synthesize(const CoefficientSet& c) const {
  check_coefficients(c, *system_);
  Impl& m = *impl_;
  const auto& bands = system_->bands();
  std::vector<CBuf> acc(m.threads, CBuf(m.half_total, cplx(0.0)));
  if (c.dense) {
    parallel_items(bands.size(), m.threads, [&](int t, std::size_t bi) {
      m.synthesize_band(bi, c.values.data() + bands[bi].offset, acc[t]);
    });
  } else {
    // Scatter each band's entries into a band-sized buffer inside the
    // worker; a dense copy of a 3D coefficient set can run to gigabytes.
    std::vector<std::size_t> order(c.positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!std::is_sorted(c.positions.begin(), c.positions.end()))
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return c.positions[a] < c.positions[b]; });
    std::vector<std::size_t> start(bands.size() + 1, order.size());
    for (std::size_t bi = 0, i = 0; bi < bands.size(); ++bi) {
      while (i < order.size() && c.positions[order[i]] < bands[bi].offset) ++i;
      start[bi] = i;
    }
    parallel_items(bands.size(), m.threads, [&](int t, std::size_t bi) {
      if (start[bi] == start[bi + 1]) return;
      std::vector<double> local(bands[bi].size, 0.0);
      for (std::size_t i = start[bi]; i < start[bi + 1]; ++i)
        local[c.positions[order[i]] - bands[bi].offset] = c.values[order[i]];
      m.synthesize_band(bi, local.data(), acc[t]);
    });
  }
  for (int t = 1; t < m.threads; ++t)
    for (std::size_t i = 0; i < m.half_total; ++i) acc[0][i] += acc[t][i];
  RBuf out(m.real_total);
  m.plan->backward(acc[0].data(), out.data());
  Raster r = zeros();
  std::copy(out.begin(), out.end(), r.data.begin());
  return r;
}

Raster ShearletTransform::frame_operator(const Raster& f) const {
  check_raster(f, *system_);
  return impl_->backward(impl_->apply_frame(impl_->forward(f)));
}

SolveResult ShearletTransform::invert_frame(const Raster& y, double tol, int max_iter) const {
  check_raster(y, *system_);
  if (!(tol > 0.0)) throw ConstraintError("tolerance must be positive");
  Impl& m = *impl_;
  m.ensure_diag();
  const std::size_t H = m.half_total;
  // Work in the Fourier domain with the Parseval-weighted inner product of
  // real fields stored as half spectra.
  std::vector<double> wt(H);
  const std::size_t nh = m.n / 2 + 1;
  for (std::size_t i = 0; i < H; ++i) {
    const std::size_t ql = i % nh;
    wt[i] = (ql == 0 || ql == m.n / 2) ? 1.0 : 2.0;
  }
  auto dot = [&](const CBuf& a, const CBuf& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < H; ++i) s += wt[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return static_cast<double>(s);
  };
  double dmax = 0.0;
  for (double v : m.diag_full) dmax = std::max(dmax, v);
  std::vector<double> precond(H);
  for (std::size_t i = 0; i < H; ++i) precond[i] = 1.0 / std::max(m.diag_full[i], 1e-12 * dmax);

  const CBuf Y = m.forward(y);
  SolveResult res;
  CBuf X(H, cplx(0.0)), R = Y, Z(H), P(H);
  const double ynorm = std::sqrt(dot(Y, Y));
  if (ynorm == 0.0) {
    res.x = zeros();
    return res;
  }
  // Minimal-residual smoothing: the returned iterate Xs moves toward each CG
  // iterate by the step that minimizes ||y - S Xs||, so the reported
  // residual never increases (plain CG only decreases the energy norm).
  CBuf Xs(H, cplx(0.0)), Rs = Y, D(H);
  for (std::size_t i = 0; i < H; ++i) Z[i] = precond[i] * R[i];
  P = Z;
  double rz = dot(R, Z);
  for (int it = 1; it <= max_iter; ++it) {
    const CBuf AP = m.apply_frame(P);
    const double pap = dot(P, AP);
    if (!(pap > 0.0)) throw SolverError("frame operator is not positive definite on the iterate", res.residuals);
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < H; ++i) {
      X[i] += alpha * P[i];
      R[i] -= alpha * AP[i];
      D[i] = R[i] - Rs[i];
    }
    const double dd = dot(D, D);
    const double eta = dd > 0.0 ? -dot(Rs, D) / dd : 0.0;
    for (std::size_t i = 0; i < H; ++i) {
      Xs[i] += eta * (X[i] - Xs[i]);
      Rs[i] += eta * D[i];
    }
    const double rel = std::sqrt(dot(Rs, Rs)) / ynorm;
    res.residuals.push_back(rel);
    res.iterations = it;
    if (rel <= tol) {
      res.x = m.backward(Xs);
      return res;
    }
    for (std::size_t i = 0; i < H; ++i) Z[i] = precond[i] * R[i];
    const double rz_new = dot(R, Z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < H; ++i) P[i] = Z[i] + beta * P[i];
  }
  throw SolverError("conjugate gradients did not reach the tolerance", res.residuals);
}

namespace {

struct Entry {
  double mag;
  std::uint64_t pos;
  double value;
};

// Strict "better" order: larger magnitude first, then smaller position.
bool better(const Entry& a, const Entry& b) {
  if (a.mag != b.mag) return a.mag > b.mag;
  return a.pos < b.pos;
}

CoefficientSet sparse_from(const CoefficientSet& like, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.pos < b.pos; });
  CoefficientSet out;
  out.spec = like.spec;
  out.total = like.total;
  out.dense = false;
  out.positions.reserve(entries.size());
  out.values.reserve(entries.size());
  for (const auto& e : entries) {
    out.positions.push_back(e.pos);
    out.values.push_back(e.value);
  }
  return out;
}

std::vector<Entry> entries_of(const CoefficientSet& c) {
  std::vector<Entry> e(c.values.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = {std::abs(c.values[i]), c.dense ? i : c.positions[i], c.values[i]};
  return e;
}

}  // namespace

CoefficientSet ShearletTransform::largest_coefficients(const Raster& f, std::size_t K) const {
  check_raster(f, *system_);
  Impl& m = *impl_;
  CoefficientSet like;
  like.spec = system_->spec();
  like.total = system_->coefficient_count();
  const CBuf F = m.forward(f);
  const auto& bands = system_->bands();
  using Heap = std::priority_queue<Entry, std::vector<Entry>, decltype(&better)>;
  std::vector<Heap> heaps;
  for (int t = 0; t < m.threads; ++t) heaps.emplace_back(&better);
  parallel_items(bands.size(), m.threads, [&](int t, std::size_t bi) {
    std::vector<double> buf(bands[bi].size);
    m.analyze_band(bi, F, buf.data());
    auto& heap = heaps[t];
    for (std::size_t i = 0; i < buf.size(); ++i) {
      const Entry e{std::abs(buf[i]), bands[bi].offset + i, buf[i]};
      if (heap.size() < K) heap.push(e);
      else if (K > 0 && better(e, heap.top())) {
        heap.pop();
        heap.push(e);
      }
    }
  });
  std::vector<Entry> all;
  for (auto& heap : heaps)
    while (!heap.empty()) {
      all.push_back(heap.top());
      heap.pop();
    }
  if (all.size() > K) {
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(K), all.end(), better);
    all.resize(K);
  }
  CoefficientSet out = sparse_from(like, std::move(all));
  out.saturated = K > like.total;
  return out;
}

std::vector<cplx> ShearletTransform::band_spectrum(std::size_t band) const {
  if (band >= system_->bands().size()) throw ConsistencyError("band index out of range");
  return *impl_->spectrum(band);
}

cplx ShearletTransform::band_spectrum_exact(std::size_t band, const std::array<std::size_t, 3>& q) const {
  const Band& b = system_->bands().at(band);
  return impl_->alias_average(q, [&](const Vec3& x) { return b.norm * system_->band_generator(b, x); });
}

const std::vector<double>& ShearletTransform::frame_diagonal() const {
  impl_->ensure_diag();
  return impl_->diag_full;
}

Raster ShearletTransform::render_element(std::size_t band, const std::array<std::size_t, 3>& p) const {
  const Impl& m = *impl_;
  const Band& b = system_->bands().at(band);
  const int d = m.d;
  const std::size_t n = m.n;
  // Full-grid spectrum by the exact path, then a direct inverse DFT:
  // sigma(x_r) = (w / L^d) sum_q D(q) exp(2 pi i q.(r - x_p) / n), x_p the
  // lattice point in pixels.
  std::vector<cplx> D(m.real_total);
  std::array<std::size_t, 3> q{0, 0, 0};
  for (std::size_t i = 0; i < m.real_total; ++i) {
    D[i] = band_spectrum_exact(band, q);
    for (int a = d - 1; a >= 0; --a) {
      if (++q[a] < n) break;
      q[a] = 0;
    }
  }
  std::array<double, 3> shift{0, 0, 0};
  for (int a = 0; a < d; ++a) shift[a] = static_cast<double>(p[a] * b.decimation[a]);
  const double two_pi_n = 2.0 * std::numbers::pi / static_cast<double>(n);
  Raster out = zeros();
  std::array<std::size_t, 3> r{0, 0, 0};
  for (std::size_t i = 0; i < m.real_total; ++i) {
    cplx s = 0.0;
    std::array<std::size_t, 3> k{0, 0, 0};
    for (std::size_t j = 0; j < m.real_total; ++j) {
      double ph = 0.0;
      for (int a = 0; a < d; ++a) ph += static_cast<double>(k[a]) * (static_cast<double>(r[a]) - shift[a]);
      s += D[j] * std::polar(1.0, two_pi_n * ph);
      for (int a = d - 1; a >= 0; --a) {
        if (++k[a] < n) break;
        k[a] = 0;
      }
    }
    out.data[i] = b.weight / m.domain_volume * s.real();
    for (int a = d - 1; a >= 0; --a) {
      if (++r[a] < n) break;
      r[a] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

CoefficientSet analyze(const Raster& f, const ShearletTransform& t) { return t.analyze(f); }
Raster synthesize(const CoefficientSet& c, const ShearletTransform& t) { return t.synthesize(c); }
Raster frame_operator(const Raster& f, const ShearletTransform& t) { return t.frame_operator(f); }
SolveResult invert_frame(const Raster& y, const ShearletTransform& t, double tol, int max_iter) {
  return t.invert_frame(y, tol, max_iter);
}

CoefficientSet n_largest(const CoefficientSet& c, std::size_t N) {
  std::vector<Entry> e = entries_of(c);
  const bool saturated = N > c.total;
  if (e.size() > N) {
    std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(N), e.end(), better);
    e.resize(N);
  }
  CoefficientSet out = sparse_from(c, std::move(e));
  out.saturated = saturated;
  return out;
}

CoefficientSet hard_threshold(const CoefficientSet& c, double tau) {
  if (!(tau >= 0.0)) throw ConstraintError("threshold must be non-negative");
  std::vector<Entry> e = entries_of(c);
  std::erase_if(e, [tau](const Entry& x) { return !(x.mag > tau); });
  return sparse_from(c, std::move(e));
}

SolveResult reconstruct_nterm(const Raster& f, const ShearletTransform& t, std::size_t N, double tol,
                              int max_iter) {
  const CoefficientSet kept = t.largest_coefficients(f, N);
  return t.invert_frame(t.synthesize(kept), tol, max_iter);
}

double coefficient_inner(const CoefficientSet& a, const CoefficientSet& b) {
  if (a.total != b.total) throw ConsistencyError("coefficient sets belong to different systems");
  const std::vector<double> da = a.to_dense();
  if (b.dense) return std::inner_product(da.begin(), da.end(), b.values.begin(), 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < b.positions.size(); ++i) s += da[b.positions[i]] * b.values[i];
  return s;
}

}  // namespace shearlab
