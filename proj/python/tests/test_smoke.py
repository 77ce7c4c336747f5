import numpy as np
import pytest

import shearlab as sl


def test_filter_dc_gain_and_closed_form():
    h0, h1 = sl.spectral_factorize(15, 10)
    assert len(h0) == 25
    assert h0.sum() == pytest.approx(1.0, abs=1e-12)
    xi = np.linspace(-0.5, 0.5, 257)
    response = np.abs(np.exp(-2j * np.pi * np.outer(xi, np.arange(len(h0)))) @ h0) ** 2
    closed = np.array([sl.squared_lowpass_magnitude(15, 10, x) for x in xi])
    assert np.max(np.abs(response - closed)) < 1e-8


def test_invalid_orders_raise_value_error():
    with pytest.raises(sl.ConstraintError):
        sl.spectral_factorize(9, 7)
    with pytest.raises(ValueError):
        sl.SystemSpec(extent=48)


def test_adjoint_and_inversion_roundtrip():
    t = sl.Transform(sl.SystemSpec(extent=32))
    rng = np.random.default_rng(1)
    f = rng.standard_normal((32, 32))
    c = rng.standard_normal(t.coefficient_count)
    h2 = (1.0 / 32) ** 2 * 8 ** 2  # pixel area of the 8-unit domain
    lhs = t.analyze(f) @ c
    rhs = h2 * np.sum(f * t.synthesize(c))
    assert lhs == pytest.approx(rhs, rel=1e-10)

    x, residuals = t.invert_frame(t.frame_operator(f), tol=1e-8)
    assert np.linalg.norm(x - f) / np.linalg.norm(f) < 1e-6
    assert all(b <= a for a, b in zip(residuals, residuals[1:]))


def test_shape_mismatch_is_reported():
    t = sl.Transform(sl.SystemSpec(extent=32))
    with pytest.raises(sl.ShapeError):
        t.analyze(np.zeros((16, 16)))


def test_classical_system_certifies_near_one():
    r = sl.estimate_bounds(sl.SystemSpec(extent=32, kind=sl.GeneratorKind.classical), 16, 8, 8)
    assert r["certified"]
    assert r["A_lower"] == pytest.approx(1.0, abs=1e-3)
    assert r["B_upper"] == pytest.approx(1.0, abs=1e-3)


def test_cartoon_is_deterministic():
    a = sl.cartoon(2, 10.0, 7, 64)
    b = sl.cartoon(2, 10.0, 7, 64)
    assert a.shape == (64, 64)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sl.cartoon(2, 10.0, 8, 64))


def test_rate_fit_and_curves():
    N = [128, 256, 512, 1024, 2048]
    slope, _, r2 = sl.fit_rate(N, [n ** -2.0 for n in N], (128, 2048))
    assert slope == pytest.approx(-2.0, abs=1e-12)
    assert r2 == pytest.approx(1.0)

    f = sl.cartoon(2, 10.0, 3, 32)
    t = sl.Transform(sl.SystemSpec(extent=32))
    curve = sl.nterm_curve(t, f, [16, 32, 64, 128], (16, 128))
    assert np.all(np.diff(curve["errors"]) <= 0)
    wav = sl.wavelet_curve(f, [16, 32, 64, 128], (16, 128))
    assert wav["slope"] < 0


def test_denoise_improves_psnr():
    clean = sl.cartoon(2, 10.0, 7, 64)
    noisy = sl.add_noise(clean, 20.0, 8)
    assert sl.psnr(clean, noisy) == pytest.approx(20.0, abs=0.3)
    t = sl.Transform(sl.SystemSpec(extent=64))
    r = sl.denoise(t, noisy, clean)
    assert r["psnr_after"] > r["psnr_before"] + 3.0
