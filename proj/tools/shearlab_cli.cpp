// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors
//
// Command-line front end. Exit codes: 0 ok, 2 invalid parameters, 3 frame
// not certified, 4 malformed input file, 5 solver failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "shearlab/cartoon.hpp"
#include "shearlab/errors.hpp"
#include "shearlab/filters.hpp"
#include "shearlab/framebounds.hpp"
#include "shearlab/io.hpp"
#include "shearlab/lab.hpp"
#include "shearlab/transform.hpp"

namespace fs = std::filesystem;
using namespace shearlab;

namespace {

enum Exit { kOk = 0, kParams = 2, kNotCertified = 3, kFormat = 4, kSolver = 5 };

// Options shared by every subcommand.
struct Common {
  int threads = 0;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  int max_iter = 500;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--threads", c.threads, "worker threads (default: SHEARLAB_THREADS, then all cores)");
  app->add_option("--tol", c.tol, "relative tolerance of the frame inversion")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for every random draw");
  app->add_option("--max-iter", c.max_iter, "iteration cap of the frame inversion")->check(CLI::PositiveNumber);
}

void apply_threads(const Common& c) {
  int t = c.threads;
  if (t <= 0)
    if (const char* env = std::getenv("SHEARLAB_THREADS")) t = std::atoi(env);
  if (t <= 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  set_num_threads(t);
}

// System flags. Precedence: explicit flags, then --config, then defaults.
struct SystemFlags {
  std::string config;
  int dim = 2, J = 0, K = 39, L = 19;
  double c1 = 1.0, c2 = 1.0, c = 0.0;
  std::string generator = "compact";
  bool relaxed = false;
  std::size_t size = 64;
  CLI::App* app = nullptr;
};

void add_system(CLI::App* app, SystemFlags& s) {
  s.app = app;
  app->add_option("--config", s.config, "system config file (key=value)");
  app->add_option("--dim", s.dim, "2 or 3");
  app->add_option("--size", s.size, "raster extent per axis (power of two)");
  app->add_option("--J", s.J, "number of scales (0: default for the size)");
  app->add_option("--K", s.K, "filter order K");
  app->add_option("--L", s.L, "filter order L");
  app->add_option("--relaxed", s.relaxed, "accept filter orders outside the strict range");
  app->add_option("--c1", s.c1, "sampling constant along the long axis");
  app->add_option("--c2", s.c2, "sampling constant across");
  app->add_option("--c", s.c, "sets c1 = c2");
  app->add_option("--generator,--system", s.generator, "compact | classical | zero");
}

bool given(const SystemFlags& s, const char* name) { return s.app->count(name) > 0; }

SystemSpec build_system(const SystemFlags& f) {
  SystemSpec s = f.config.empty() ? SystemSpec{} : SystemSpec::from_config(read_file(f.config));
  if (given(f, "--dim")) s.dim = f.dim;
  if (given(f, "--size")) s.extent = f.size;
  if (given(f, "--J")) s.J_max = f.J;
  if (given(f, "--K")) s.K = f.K;
  if (given(f, "--L")) s.L = f.L;
  if (given(f, "--relaxed")) s.relaxed = f.relaxed;
  if (given(f, "--c1")) s.c1 = f.c1;
  if (given(f, "--c2")) s.c2 = f.c2;
  if (given(f, "--c")) s.c1 = s.c2 = f.c;
  if (given(f, "--generator")) {
    if (f.generator == "compact") s.kind = GeneratorKind::CompactSeparable;
    else if (f.generator == "classical") s.kind = GeneratorKind::BandLimitedClassical;
    else if (f.generator == "zero") s.kind = GeneratorKind::Zero;
    else throw ConstraintError("unknown generator '" + f.generator + "'");
  }
  s.validate();
  return s;
}

void say(const std::string& line) { std::cout << line << '\n'; }

// --------------------------------------------------------------------------

int cmd_construct(int K, int L, bool relaxed, const std::string& out) {
  validate_orders(K, L, relaxed);
  const FilterPair p = spectral_factorize(K, L, relaxed);
  fs::create_directories(out);
  double dc = 0.0;
  for (double v : p.h0) dc += v;
  std::ostringstream csv;
  csv << "# K=" << K << " L=" << L << " relaxed=" << (relaxed ? 1 : 0) << '\n'
      << "# dc_gain=" << format_sci(dc) << '\n'
      << "# factorization_residual=" << format_sci(factorization_residual(p)) << '\n'
      << "n,h0,h1\n";
  for (std::size_t n = 0; n < p.h0.size(); ++n)
    csv << n << ',' << format_sci(p.h0[n]) << ',' << format_sci(p.h1[n]) << '\n';
  write_file((fs::path(out) / "filters.csv").string(), csv.str());

  // Sampled spectra on [-2, 2): rows xi, Re/Im phi_hat, |m0|^2.
  const int G = 1024;
  F64RArray a;
  a.extents = {4, static_cast<std::uint64_t>(G)};
  a.data.resize(4 * G);
  for (int i = 0; i < G; ++i) {
    const double xi = -2.0 + 4.0 * i / G;
    const cplx phi = scaling_spectrum(p, xi);
    a.data[i] = xi;
    a.data[G + i] = phi.real();
    a.data[2 * G + i] = phi.imag();
    a.data[3 * G + i] = std::norm(p.m0(xi));
  }
  write_f64r((fs::path(out) / "spectra.f64r").string(), a);
  say("dc_gain " + format_sci(dc));
  say("wrote " + (fs::path(out) / "filters.csv").string());
  return kOk;
}

int cmd_certify(const SystemSpec& s, const std::string& out, bool bisect, int theta_po, int gamma_po, int radius) {
  const FrameBoundsReport r = estimate_bounds(s, theta_po, gamma_po, radius);
  if (!out.empty()) {
    write_file(out + ".csv", r.to_csv());
    write_file(out + ".txt", r.to_text());
  }
  std::cout << r.to_text();
  if (bisect) {
    const double c = largest_certified_c(s, std::exp2(-6.0), 4.0, 12, gamma_po, radius);
    say("largest_certified_c " + format_sci(c));
    if (!out.empty()) write_file(out + ".bisect.csv", "# largest certified c = c1 = c2\nc\n" + format_sci(c) + '\n');
  }
  return r.certified ? kOk : kNotCertified;
}

int cmd_transform(const SystemFlags& flags, const std::string& in, const std::string& out, std::size_t keep) {
  const Raster f = read_raster(in);
  SystemFlags local = flags;
  SystemSpec s = build_system(local);
  s.dim = f.dim;
  s.extent = f.extents[0];
  s.validate();
  const ShearletTransform t(s);
  const CoefficientSet c = keep ? t.largest_coefficients(f, keep) : t.analyze(f);
  write_coefficients(out, c);
  say("coefficients " + std::to_string(c.stored()) + " of " + std::to_string(c.total));
  return kOk;
}

int cmd_reconstruct(const std::string& in, const std::string& out, const std::string& reference, const Common& c) {
  const CoefficientSet coeffs = read_coefficients(in);
  const ShearletTransform t(coeffs.spec);
  const SolveResult r = t.invert_frame(t.synthesize(coeffs), c.tol, c.max_iter);
  write_raster(out, r.x);
  say("iterations " + std::to_string(r.iterations));
  if (!reference.empty()) {
    const Raster f = read_raster(reference);
    if (f.data.size() != r.x.data.size()) throw FormatError("reference raster has a different size");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      num += (f.data[i] - r.x.data[i]) * (f.data[i] - r.x.data[i]);
      den += f.data[i] * f.data[i];
    }
    say("relative_error " + format_sci(std::sqrt(num / den)));
  }
  return kOk;
}

CartoonSpec make_cartoon(int dim, double nu, int pieces, std::uint64_t seed) {
  return dim == 2 ? random_cartoon_2d(nu, seed) : surface_cartoon_3d(nu, pieces, seed);
}

int cmd_cartoon(int dim, double nu, int pieces, std::size_t size, const Common& c, const std::string& out,
                const std::string& pgm) {
  if (dim != 2 && dim != 3) throw ConstraintError("--dim must be 2 or 3");
  const CartoonSpec spec = make_cartoon(dim, nu, pieces, c.seed);
  spec.validate();
  const Raster r = rasterize_cartoon(spec, size);
  write_raster(out, r);
  write_file(out + ".cartoon", spec.to_text());
  if (!pgm.empty()) write_pgm(pgm, r);
  say("wrote " + out);
  return kOk;
}

int cmd_rate(const SystemSpec& sys, double nu, int pieces, const Common& c, const std::string& out,
             const std::string& wavelet_out, int lo, int hi) {
  const CartoonSpec spec = make_cartoon(sys.dim, nu, pieces, c.seed);
  spec.validate();
  const Raster f = rasterize_cartoon(spec, sys.extent);
  const auto Ns = dyadic_counts(lo, hi, 2);
  const std::pair<std::size_t, std::size_t> window{Ns.front(), Ns.back()};
  const ShearletTransform t(sys);
  const RateCurve curve = nterm_curve(f, t, Ns, window, c.tol, c.max_iter);
  write_file(out, curve.to_csv());
  say("shearlet_slope " + format_sci(curve.fitted_slope));
  if (!wavelet_out.empty()) {
    const RateCurve w = wavelet_baseline_curve(f, Ns, window);
    write_file(wavelet_out, w.to_csv());
    say("wavelet_slope " + format_sci(w.fitted_slope));
  }
  return kOk;
}

int cmd_denoise(const SystemFlags& flags, const std::string& in, const std::string& clean_path, double kappa,
                double sigma, double input_psnr, double nu, const Common& c, const std::string& out,
                const std::string& report) {
  Raster clean, noisy;
  if (in.empty()) {
    // Synthetic run: seeded cartoon plus noise at the requested PSNR.
    SystemFlags local = flags;
    const SystemSpec s = build_system(local);
    clean = rasterize_cartoon(random_cartoon_2d(nu, c.seed), s.extent);
    noisy = add_noise_at_psnr(clean, input_psnr, c.seed + 1);
  } else {
    noisy = read_raster(in);
    clean = clean_path.empty() ? noisy : read_raster(clean_path);
    if (clean.data.size() != noisy.data.size()) throw FormatError("clean and noisy rasters differ in size");
  }
  SystemFlags local = flags;
  SystemSpec s = build_system(local);
  s.dim = noisy.dim;
  s.extent = noisy.extents[0];
  s.validate();
  const ShearletTransform t(s);
  const DenoiseResult r = denoise(noisy, clean, t, {kappa, sigma}, c.tol, c.max_iter);
  if (!out.empty()) write_raster(out, r.estimate);
  std::ostringstream rep;
  rep << "# denoising report\nsigma,kappa,psnr_before,psnr_after,kept,iterations\n"
      << format_sci(r.sigma) << ',' << format_sci(kappa) << ',' << format_sci(r.psnr_before) << ','
      << format_sci(r.psnr_after) << ',' << r.kept << ',' << r.iterations << '\n';
  if (!report.empty()) write_file(report, rep.str());
  say("psnr_before " + format_sci(r.psnr_before));
  say("psnr_after " + format_sci(r.psnr_after));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compactly supported shearlet frames: construction, certification and experiments"};
  app.require_subcommand(1);
  Common common;

  auto* construct = app.add_subcommand("construct", "spectral factorization of the filter pair");
  int K = 39, L = 19;
  bool relaxed = false;
  std::string out;
  construct->add_option("--K", K)->required();
  construct->add_option("--L", L)->required();
  construct->add_option("--relaxed", relaxed);
  construct->add_option("--out", out, "output directory")->default_val("filters");
  add_common(construct, common);

  SystemFlags sysflags;
  auto* certify = app.add_subcommand("certify", "frame-bound sandwich");
  bool bisect = false;
  int theta_po = 48, gamma_po = 12, radius = 32;
  add_system(certify, sysflags);
  certify->add_flag("--bisect", bisect, "also report the largest certified c = c1 = c2");
  certify->add_option("--theta-grid", theta_po, "theta grid points per octave");
  certify->add_option("--gamma-grid", gamma_po, "gamma grid points per octave");
  certify->add_option("--radius", radius, "lattice shell cap");
  certify->add_option("--out", out, "report prefix (writes .csv and .txt)");
  add_common(certify, common);

  SystemFlags tflags;
  auto* transform = app.add_subcommand("transform", "shearlet coefficients of a raster");
  std::string in;
  std::size_t keep = 0;
  add_system(transform, tflags);
  transform->add_option("--in", in)->required();
  transform->add_option("--out", out)->required();
  transform->add_option("--keep", keep, "store only the N largest coefficients");
  add_common(transform, common);

  auto* reconstruct = app.add_subcommand("reconstruct", "invert the frame operator on coefficients");
  std::string reference;
  reconstruct->add_option("--in", in)->required();
  reconstruct->add_option("--out", out)->required();
  reconstruct->add_option("--reference", reference, "raster to report the relative error against");
  add_common(reconstruct, common);

  auto* cartoon = app.add_subcommand("cartoon", "seeded cartoon-like raster");
  int dim = 2, pieces = 1;
  double nu = 10.0;
  std::size_t size = 256;
  std::string pgm;
  cartoon->add_option("--dim", dim);
  cartoon->add_option("--nu", nu);
  cartoon->add_option("--pieces", pieces, "3D: 1 smooth surface, >1 rounded cube patches");
  cartoon->add_option("--size", size);
  cartoon->add_option("--out", out)->default_val("cartoon.f64r");
  cartoon->add_option("--pgm", pgm, "also write an 8-bit PGM preview");
  add_common(cartoon, common);

  SystemFlags rflags;
  auto* rate = app.add_subcommand("rate", "N-term approximation curve of a seeded cartoon");
  std::string wavelet_out;
  int lo = 7, hi = 0;
  add_system(rate, rflags);
  rate->add_option("--nu", nu);
  rate->add_option("--pieces", pieces);
  rate->add_option("--out", out)->default_val("rate.csv");
  rate->add_option("--wavelet-out", wavelet_out, "also write the wavelet baseline curve");
  rate->add_option("--lo", lo, "log2 of the smallest N");
  rate->add_option("--hi", hi, "log2 of the largest N (default 12 in 2D, 11 in 3D)");
  add_common(rate, common);

  SystemFlags dflags;
  auto* den = app.add_subcommand("denoise", "hard-threshold denoising");
  std::string clean;
  double kappa = 0.6, sigma = -1.0, input_psnr = 20.0;
  add_system(den, dflags);
  den->add_option("--in", in, "noisy raster (omit for a synthetic cartoon)");
  den->add_option("--clean", clean, "clean reference raster");
  den->add_option("--kappa", kappa);
  den->add_option("--sigma", sigma, "noise level (default: estimated)");
  den->add_option("--psnr", input_psnr, "input PSNR of the synthetic run");
  den->add_option("--nu", nu);
  den->add_option("--out", out);
  den->add_option("--report", reference, "CSV report path");
  add_common(den, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParams;
  }

  try {
    apply_threads(common);
    if (*construct) return cmd_construct(K, L, relaxed, out);
    if (*certify) return cmd_certify(build_system(sysflags), out, bisect, theta_po, gamma_po, radius);
    if (*transform) return cmd_transform(tflags, in, out, keep);
    if (*reconstruct) return cmd_reconstruct(in, out, reference, common);
    if (*cartoon) return cmd_cartoon(dim, nu, pieces, size, common, out, pgm);
    if (*rate) {
      const SystemSpec s = build_system(rflags);
      return cmd_rate(s, nu, pieces, common, out, wavelet_out, lo, hi > 0 ? hi : (s.dim == 2 ? 12 : 11));
    }
    if (*den) return cmd_denoise(dflags, in, clean, kappa, sigma, input_psnr, nu, common, out, reference);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const FactorizationError& e) {
    std::cerr << "factorization failure: " << e.what() << '\n';
    return kSolver;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ShapeError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ConsistencyError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ConstraintError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kParams;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
