// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shearlab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Quadrature-mirror style pair built from the cosine/sine-series low-pass.
///
/// The low-pass response is m0(xi) = sum_n h0[n] exp(-2 pi i n xi) with
/// m0(0) = 1, and the band-pass is its half-period modulation
/// m1(xi) = m0(xi + 1/2), i.e. h1[n] = (-1)^n h0[n].
struct FilterPair {
  int K = 0;
  int L = 0;
  std::vector<double> h0;
  std::vector<double> h1;

  cplx m0(double xi) const;
  cplx m1(double xi) const;
};

/// Throws ConstraintError unless L >= 10 and 3L/2 <= K <= 3L-2. With
/// `relaxed` any K, L >= 1 is accepted.
void validate_orders(int K, int L, bool relaxed = false);

/// (cos pi xi)^{2K} * sum_{n<L} C(K-1+n, n) (sin pi xi)^{2n}, evaluated by
/// Horner's rule in sin^2 with long double accumulation.
double squared_lowpass_magnitude(int K, int L, double xi, bool relaxed = false);

/// Minimum-phase FIR factor of the squared low-pass magnitude.
///
/// The K-fold zero at xi = 1/2 is split off analytically; the remaining
/// degree L-1 polynomial in y = sin^2(pi xi) is solved with a companion
/// eigensolve, the roots are polished by simultaneous Aberth iterations in
/// long double and then mapped to the z-plane roots inside the unit circle.
FilterPair spectral_factorize(int K, int L, bool relaxed = false);

/// Largest |Hhat0|^2 - closed form| over `points` equispaced frequencies.
double factorization_residual(const FilterPair& pair, int points = 4096);

/// phi_hat(xi) = prod_{j=0}^{J_trunc-1} m0(2^{-j} xi), times the linear-phase
/// product of the omitted factors. Each omitted factor is 1 - O(2^{-j}|xi|);
/// after the phase correction the truncation error is O(8^{-J_trunc}|xi|^3).
cplx scaling_spectrum(const FilterPair& pair, double xi, int J_trunc = 30);

/// |phi_hat(xi)| from the closed-form squared magnitude. Unlike the tap
/// evaluation it keeps full relative accuracy deep in the stop band, which
/// the decay fits rely on.
double scaling_magnitude(int K, int L, double xi, int J_trunc = 30);

/// Tabulated phi_hat for bulk evaluation. The table stores phi_hat with its
/// linear phase removed (group delay at the origin) and interpolates with
/// six-point Lagrange weights; arguments beyond the table use the refinement
/// relation phi_hat(x) = m0(x) phi_hat(x/2).
class ScalingTable {
 public:
  explicit ScalingTable(std::shared_ptr<const FilterPair> pair, int J_trunc = 30,
                        double half_width = 64.0, int steps_per_unit = 2048);
  cplx operator()(double x) const;
  double half_width() const { return half_width_; }

 private:
  std::shared_ptr<const FilterPair> pair_;
  int J_trunc_;
  double half_width_;
  double step_;
  double delay_;
  std::vector<cplx> table_;
};

enum class GeneratorKind { CompactSeparable, BandLimitedClassical, Zero };

std::string to_string(GeneratorKind kind);

/// Fitted decay exponents of |psi_hat(xi)| <= C min{1,|xi_1|^alpha}
/// min{1,|xi_1|^-gamma} min{1,|xi_2|^-gamma}. Band-limited generators report
/// infinite exponents.
struct DecayParams {
  double C = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  bool sparsity_grade = false;
};

/// Axis-aligned spatial box; `lo`/`hi` use the first `dim` entries.
struct SupportBox {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};
};

/// A generator is a frequency-domain evaluator plus provenance.
///
/// `long_axis` is the axis carrying the wavelet factor (0 for psi, 1 for the
/// swapped psi-tilde, 2 for psi-breve); scaling functions use -1.
struct Generator {
  int dim = 2;
  GeneratorKind kind = GeneratorKind::Zero;
  int long_axis = -1;
  std::function<cplx(const Vec3&)> spectrum;
  /// Relative-accurate |spectrum| where available (used for decay fits).
  std::function<double(const Vec3&)> magnitude;
  std::shared_ptr<const FilterPair> filters;
  std::optional<SupportBox> support_hint;
  DecayParams decay;
  /// Frequency (in generator units) that the finest digital band maps to
  /// the raster Nyquist frequency; see transform.hpp.
  double nyquist_argument = 0.125;

  cplx operator()(const Vec3& xi) const { return spectrum ? spectrum(xi) : cplx(0.0); }
};

/// Generators of one 2D or 3D system: the scaling function and one shearlet
/// generator per cone or pyramid pair.
struct GeneratorSet {
  int dim = 2;
  GeneratorKind kind = GeneratorKind::Zero;
  Generator phi;
  std::vector<Generator> psi;  // size dim
};

/// Wavelet factor along the long axis of the compact generator:
/// u(t) = m1(4t) phi_hat(t).
cplx compact_along(const FilterPair& pair, double t, int J_trunc = 30);
/// Factor across the long axis: v(t) = phi_hat(2t).
cplx compact_across(const FilterPair& pair, double t, int J_trunc = 30);

/// psi_hat(xi) = m1(4 xi_1) phi_hat(xi_1) phi_hat(2 xi_2).
Generator compact_shearlet_2d(std::shared_ptr<const FilterPair> pair);
/// phi(x) = phi_1(x_1) phi_1(x_2).
Generator compact_scaling(std::shared_ptr<const FilterPair> pair, int dim);
/// (psi, psi-tilde, psi-breve) with psi(x) = eta(x_1) phi(x_2) phi(x_3).
std::array<Generator, 3> compact_shearlets_3d(std::shared_ptr<const FilterPair> pair);

/// Meyer ramp t^4 (35 - 84 t + 70 t^2 - 20 t^3), clamped to [0, 1].
double meyer_ramp(double t);
/// Low-pass profile: 1 on |s| <= 1/8, Meyer transition to 0 at |s| = 1/4.
double classical_lowpass(double s);
/// Wavelet profile with support [1/8, 1/2] and sum_j psi1(2^-j s)^2 = 1.
double classical_psi1(double s);
/// Bump with support [-1, 1] and sum_k psi2(t + k)^2 = 1.
double classical_psi2(double t);

/// (phi, psi) of the band-limited reference system. Elements built from psi
/// are truncated to their cone (see transform.hpp), which makes the system
/// Parseval.
std::pair<Generator, Generator> classical_bandlimited_2d();

/// Complete generator sets used by SystemSpec.
GeneratorSet make_compact_set(std::shared_ptr<const FilterPair> pair, int dim);
GeneratorSet make_classical_set();
GeneratorSet make_zero_set(int dim);

/// Log-log envelope fit of a generator spectrum (see DecayParams).
DecayParams fit_decay(const Generator& g);

}  // namespace shearlab
