import numpy as np
import pytest

from prnulab.denoise import (
    DenoiseResult,
    PointSpreadFunction,
    gaussian_psf,
    lucy_richardson,
    noise_residual,
    spatial_wiener,
    wavelet_wiener,
)
from prnulab.simulate import make_scene
from prnulab.transforms import dwt2


# ---------------------------------------------------------------------------
# wavelet-domain Wiener


def test_wavelet_wiener_constant_image():
    res = wavelet_wiener(np.full((64, 64), 123.0), sigma0=2.0)
    assert np.abs(res.residual).max() < 1e-3


def test_wavelet_wiener_residual_variance_monte_carlo():
    # white noise of std 5 on a constant, filtered at sigma0=5: the residual
    # recovers the noise, its variance lands within +-30% of 25 over seeds
    variances = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        img = 128.0 + rng.normal(0, 5.0, (64, 64))
        variances.append(float(noise_residual(img, sigma0=5.0).var()))
    mean_var = float(np.mean(variances))
    assert 25.0 * 0.7 <= mean_var <= 25.0 * 1.3


def test_wavelet_wiener_reconstruction_and_lowpass_erasure():
    img = make_scene(64, 64, "texture", seed=7)
    res = wavelet_wiener(img, sigma0=2.0)
    assert isinstance(res, DenoiseResult)
    # residual defined by subtraction: denoised + residual gives the input
    # back to float32 rounding
    assert np.abs((res.denoised + res.residual) - img).max() < 1e-3
    # the residual carries no lowpass content
    pyr = dwt2(res.residual, levels=4)
    detail_energy = sum((b ** 2).sum() for bands in pyr.details for b in bands)
    assert np.abs(pyr.approx).max() < 1e-3
    assert detail_energy > 0


def test_wavelet_wiener_constant_vs_natural_energy():
    const_energy = (noise_residual(np.full((64, 64), 90.0)) ** 2).sum()
    natural_energy = (noise_residual(make_scene(64, 64, "texture", seed=1)) ** 2).sum()
    assert const_energy < 1e-6 * natural_energy


def test_wavelet_wiener_rejects_bad_sigma():
    with pytest.raises(ValueError):
        wavelet_wiener(np.zeros((32, 32)), sigma0=0.0)


# ---------------------------------------------------------------------------
# spatial Wiener


def test_spatial_wiener_constant_identity():
    img = np.full((32, 32), 55.0, dtype=np.float32)
    assert np.allclose(spatial_wiener(img, 3), img, atol=1e-6)


def test_spatial_wiener_shrinks_impulse():
    img = np.full((17, 17), 100.0)
    img[8, 8] = 200.0
    out = spatial_wiener(img, 3)
    assert out[8, 8] - 100.0 < 100.0 - 1e-3


def oracle_spatial_wiener(img, window):
    half = window // 2
    padded = np.pad(img, half, mode="symmetric")
    h, w = img.shape
    mu = np.zeros((h, w))
    var = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            block = padded[i: i + window, j: j + window]
            mu[i, j] = block.mean()
            var[i, j] = block.var()
    noise = var.mean()
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            gain = max(var[i, j] - noise, 0.0) / max(var[i, j], noise)
            out[i, j] = mu[i, j] + gain * (img[i, j] - mu[i, j])
    return out


def test_spatial_wiener_matches_per_pixel_oracle():
    rng = np.random.default_rng(11)
    img = rng.uniform(0, 255, (16, 16))
    got = spatial_wiener(img, 3)
    want = oracle_spatial_wiener(img, 3)
    assert np.abs(got - want).max() < 1e-4


def test_spatial_wiener_reduces_variance_on_white_noise():
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        img = 128.0 + rng.normal(0, 10.0, (32, 32))
        wins += int(spatial_wiener(img, 3).var() <= img.var())
    assert wins >= 19  # 95% of trials


def test_spatial_wiener_rejects_even_window():
    with pytest.raises(ValueError):
        spatial_wiener(np.zeros((8, 8)), 4)


# ---------------------------------------------------------------------------
# Lucy-Richardson


def test_psf_validation():
    with pytest.raises(ValueError):
        PointSpreadFunction(np.ones((2, 2)) / 4.0)
    with pytest.raises(ValueError):
        PointSpreadFunction(np.array([[0.5, 0.0, 0.6]]))
    with pytest.raises(ValueError):
        PointSpreadFunction(np.array([[-0.5, 1.5, 0.0]]))
    psf = gaussian_psf(3, 0.8)
    assert psf.kernel.shape == (3, 3)
    assert np.isclose(psf.kernel.sum(), 1.0, atol=1e-12)


def test_lucy_identity_psf_is_fixed_point():
    img = np.random.default_rng(12).uniform(0, 255, (16, 16)).astype(np.float32)
    ident = PointSpreadFunction(np.array([[1.0]]))
    out = lucy_richardson(img, ident, iterations=7)
    assert np.allclose(out, img, atol=1e-6)


def test_lucy_sharpens_blurred_point_source():
    psf = gaussian_psf(3, 0.8)
    from scipy.ndimage import convolve

    delta = np.zeros((33, 33))
    delta[16, 16] = 100.0
    blurred = convolve(delta, psf.kernel, mode="wrap")
    out = lucy_richardson(blurred, psf, iterations=20)
    assert out[16, 16] > blurred[16, 16]
    assert np.unravel_index(np.argmax(out), out.shape) == (16, 16)


def test_lucy_flux_conservation():
    rng = np.random.default_rng(13)
    img = rng.uniform(0, 255, (16, 16))
    psf = gaussian_psf(3, 1.2)
    out = lucy_richardson(img, psf, iterations=5)
    assert abs(out.sum() - img.sum()) / img.sum() < 1e-3


def test_lucy_non_negativity_every_iteration():
    rng = np.random.default_rng(14)
    img = np.maximum(rng.normal(20, 30, (24, 24)), 0.0)  # many zeros
    psf = gaussian_psf(3, 0.8)
    for iters in (1, 2, 5, 9):
        assert lucy_richardson(img, psf, iters).min() >= 0.0


def test_lucy_clamps_negative_input():
    img = np.full((8, 8), -5.0)
    out = lucy_richardson(img, gaussian_psf(), 3)
    assert np.all(out == 0.0)
