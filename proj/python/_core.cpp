// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors
//
// Python bindings. Rasters cross the boundary as C-contiguous float64
// arrays of shape (n, n) or (n, n, n).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "shearlab/cartoon.hpp"
#include "shearlab/errors.hpp"
#include "shearlab/filters.hpp"
#include "shearlab/framebounds.hpp"
#include "shearlab/lab.hpp"
#include "shearlab/transform.hpp"

namespace py = pybind11;
using namespace shearlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Raster to_raster(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw ShapeError("expected a 2D or 3D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  for (py::ssize_t k = 1; k < a.ndim(); ++k)
    if (static_cast<std::size_t>(a.shape(k)) != n) throw ShapeError("array must have equal extents");
  Raster r(static_cast<int>(a.ndim()), n);
  std::memcpy(r.data.data(), a.data(), r.data.size() * sizeof(double));
  return r;
}

Array to_array(const Raster& r) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(r.dim), static_cast<py::ssize_t>(r.extents[0]));
  Array a(shape);
  std::memcpy(a.mutable_data(), r.data.data(), r.data.size() * sizeof(double));
  return a;
}

Array to_vector(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
  return a;
}

py::dict curve_dict(const RateCurve& c) {
  py::dict d;
  d["label"] = c.label;
  d["N"] = c.Ns;
  d["errors"] = c.errors;
  d["slope"] = c.fitted_slope;
  d["intercept"] = c.intercept;
  d["r_squared"] = c.r_squared;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compactly supported shearlet frames";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConstraintError>(m, "ConstraintError", PyExc_ValueError);
  py::register_exception<FactorizationError>(m, "FactorizationError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<FitError>(m, "FitError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("squared_lowpass_magnitude", &squared_lowpass_magnitude, py::arg("K"), py::arg("L"), py::arg("xi"),
        py::arg("relaxed") = false);
  m.def(
      "spectral_factorize",
      [](int K, int L, bool relaxed) {
        const FilterPair p = spectral_factorize(K, L, relaxed);
        return py::make_tuple(to_vector(p.h0), to_vector(p.h1));
      },
      py::arg("K"), py::arg("L"), py::arg("relaxed") = false, "Low-pass and band-pass filter taps (h0, h1).");

  py::enum_<GeneratorKind>(m, "GeneratorKind")
      .value("compact", GeneratorKind::CompactSeparable)
      .value("classical", GeneratorKind::BandLimitedClassical)
      .value("zero", GeneratorKind::Zero);

  py::class_<SystemSpec>(m, "SystemSpec")
      .def(py::init([](int dim, std::size_t extent, double c1, double c2, GeneratorKind kind, int K, int L,
                       bool relaxed, int J_max) {
             SystemSpec s;
             s.dim = dim;
             s.extent = extent;
             s.c1 = c1;
             s.c2 = c2;
             s.kind = kind;
             s.K = K;
             s.L = L;
             s.relaxed = relaxed;
             s.J_max = J_max;
             s.validate();
             return s;
           }),
           py::arg("dim") = 2, py::arg("extent") = 64, py::arg("c1") = 1.0, py::arg("c2") = 1.0,
           py::arg("kind") = GeneratorKind::CompactSeparable, py::arg("K") = 39, py::arg("L") = 19,
           py::arg("relaxed") = false, py::arg("J_max") = 0)
      .def_readwrite("dim", &SystemSpec::dim)
      .def_readwrite("extent", &SystemSpec::extent)
      .def_readwrite("c1", &SystemSpec::c1)
      .def_readwrite("c2", &SystemSpec::c2)
      .def_readwrite("kind", &SystemSpec::kind)
      .def_readwrite("K", &SystemSpec::K)
      .def_readwrite("L", &SystemSpec::L)
      .def_readwrite("relaxed", &SystemSpec::relaxed)
      .def_readwrite("J_max", &SystemSpec::J_max)
      .def("to_config", &SystemSpec::to_config)
      .def_static("from_config", &SystemSpec::from_config);

  py::class_<ShearletTransform>(m, "Transform")
      .def(py::init<const SystemSpec&>(), py::arg("spec"))
      .def_property_readonly("coefficient_count",
                             [](const ShearletTransform& t) { return t.system().coefficient_count(); })
      .def_property_readonly("band_count", [](const ShearletTransform& t) { return t.system().bands().size(); })
      .def(
          "analyze", [](const ShearletTransform& t, const Array& f) { return to_vector(t.analyze(to_raster(f)).values); },
          py::arg("f"), "Dense coefficient vector in enumeration order.")
      .def(
          "synthesize",
          [](const ShearletTransform& t, const Array& c) {
            CoefficientSet s;
            s.spec = t.system().spec();
            s.total = t.system().coefficient_count();
            s.values.assign(c.data(), c.data() + c.size());
            return to_array(t.synthesize(s));
          },
          py::arg("coefficients"))
      .def(
          "frame_operator",
          [](const ShearletTransform& t, const Array& f) { return to_array(t.frame_operator(to_raster(f))); },
          py::arg("f"))
      .def(
          "invert_frame",
          [](const ShearletTransform& t, const Array& y, double tol, int max_iter) {
            const SolveResult r = t.invert_frame(to_raster(y), tol, max_iter);
            return py::make_tuple(to_array(r.x), r.residuals);
          },
          py::arg("y"), py::arg("tol") = 1e-6, py::arg("max_iter") = 500, "Returns (x, residual history).")
      .def(
          "largest",
          [](const ShearletTransform& t, const Array& f, std::size_t K) {
            const CoefficientSet c = t.largest_coefficients(to_raster(f), K);
            return py::make_tuple(c.positions, to_vector(c.values));
          },
          py::arg("f"), py::arg("N"), "(positions, values) of the N largest coefficients.");

  m.def(
      "estimate_bounds",
      [](const SystemSpec& s, int theta_po, int gamma_po, int radius) {
        const FrameBoundsReport r = estimate_bounds(s, theta_po, gamma_po, radius);
        py::dict d;
        d["L_inf"] = r.L_inf_est;
        d["L_sup"] = r.L_sup_est;
        d["R"] = r.R_c;
        d["A_lower"] = r.A_lower;
        d["B_upper"] = r.B_upper;
        d["certified"] = r.certified;
        d["text"] = r.to_text();
        return d;
      },
      py::arg("spec"), py::arg("theta_per_octave") = 48, py::arg("gamma_per_octave") = 12, py::arg("m_radius") = 32);

  m.def(
      "cartoon",
      [](int dim, double nu, std::uint64_t seed, std::size_t size, int pieces) {
        const CartoonSpec c = dim == 2 ? random_cartoon_2d(nu, seed) : surface_cartoon_3d(nu, pieces, seed);
        c.validate();
        return to_array(rasterize_cartoon(c, size));
      },
      py::arg("dim") = 2, py::arg("nu") = 10.0, py::arg("seed") = 1, py::arg("size") = 256, py::arg("pieces") = 1);

  m.def(
      "fit_rate",
      [](const std::vector<std::size_t>& Ns, const std::vector<double>& e, std::pair<std::size_t, std::size_t> w) {
        const RateFit f = fit_rate(Ns, e, w);
        return py::make_tuple(f.slope, f.intercept, f.r_squared);
      },
      py::arg("N"), py::arg("errors"), py::arg("window"));
  m.def(
      "nterm_curve",
      [](const ShearletTransform& t, const Array& f, const std::vector<std::size_t>& Ns,
         std::pair<std::size_t, std::size_t> w, double tol) {
        return curve_dict(nterm_curve(to_raster(f), t, Ns, w, tol));
      },
      py::arg("transform"), py::arg("f"), py::arg("N"), py::arg("window"), py::arg("tol") = 1e-6);
  m.def(
      "wavelet_curve",
      [](const Array& f, const std::vector<std::size_t>& Ns, std::pair<std::size_t, std::size_t> w) {
        return curve_dict(wavelet_baseline_curve(to_raster(f), Ns, w));
      },
      py::arg("f"), py::arg("N"), py::arg("window"));
  m.def(
      "denoise",
      [](const ShearletTransform& t, const Array& noisy, const Array& clean, double kappa, double sigma) {
        const DenoiseResult r = denoise(to_raster(noisy), to_raster(clean), t, {kappa, sigma});
        py::dict d;
        d["estimate"] = to_array(r.estimate);
        d["sigma"] = r.sigma;
        d["psnr_before"] = r.psnr_before;
        d["psnr_after"] = r.psnr_after;
        d["kept"] = r.kept;
        return d;
      },
      py::arg("transform"), py::arg("noisy"), py::arg("clean"), py::arg("kappa") = 0.6, py::arg("sigma") = -1.0);
  m.def(
      "add_noise",
      [](const Array& clean, double db, std::uint64_t seed) { return to_array(add_noise_at_psnr(to_raster(clean), db, seed)); },
      py::arg("clean"), py::arg("psnr_db"), py::arg("seed"));
  m.def(
      "psnr", [](const Array& a, const Array& b) { return psnr(to_raster(a), to_raster(b)); }, py::arg("reference"),
      py::arg("x"));
}
