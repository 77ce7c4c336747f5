"""Compactly supported shearlet frames: filters, transforms, frame bounds and
sparse-approximation experiments.

Rasters are float64 arrays of shape (n, n) or (n, n, n) with n a power of two.
"""

from ._core import (
    ConsistencyError,
    ConstraintError,
    Error,
    FactorizationError,
    FitError,
    FormatError,
    GeneratorKind,
    ShapeError,
    SolverError,
    SystemSpec,
    Transform,
    add_noise,
    cartoon,
    denoise,
    estimate_bounds,
    fit_rate,
    nterm_curve,
    psnr,
    set_num_threads,
    spectral_factorize,
    squared_lowpass_magnitude,
    wavelet_curve,
)

__all__ = [
    "ConsistencyError",
    "ConstraintError",
    "Error",
    "FactorizationError",
    "FitError",
    "FormatError",
    "GeneratorKind",
    "ShapeError",
    "SolverError",
    "SystemSpec",
    "Transform",
    "add_noise",
    "cartoon",
    "denoise",
    "estimate_bounds",
    "fit_rate",
    "nterm_curve",
    "psnr",
    "set_num_threads",
    "spectral_factorize",
    "squared_lowpass_magnitude",
    "wavelet_curve",
]
