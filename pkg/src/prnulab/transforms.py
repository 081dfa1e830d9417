"""Numeric substrate: separable orthogonal 2-D wavelet transform with
periodic boundaries, blockwise 8x8 orthonormal DCT, and circular
normalized cross-correlation.

All three transforms are critically sampled / energy preserving, which the
test suite checks via Parseval identities and exact round trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import DimensionMismatch, MalformedPyramid, NotTileable, TooManyLevels

# ---------------------------------------------------------------------------
# wavelet filters


@lru_cache(maxsize=None)
def daubechies_filter(moments: int) -> np.ndarray:
    """Orthonormal Daubechies scaling filter with the given number of
    vanishing moments (length ``2 * moments``), extremal-phase variant.

    Built by spectral factorization: the halfband polynomial's roots inside
    the unit circle are combined with the ``(1+z)/2`` factors, then the
    result is normalized to sum to sqrt(2).
    """
    p = int(moments)
    if p < 1:
        raise ValueError("moments must be >= 1")
    if p == 1:
        return np.array([1.0, 1.0]) / np.sqrt(2.0)
    # z^(p-1) * P(y(z)) with y = (2 - z - 1/z) / 4, highest degree first
    zy = np.array([-0.25, 0.5, -0.25])
    total = np.zeros(2 * p - 1)
    for k in range(p):
        term = np.array([1.0])
        for _ in range(k):
            term = np.convolve(term, zy)
        shift = p - 1 - k
        padded = np.zeros(2 * p - 1)
        padded[2 * p - 2 - (len(term) - 1 + shift): 2 * p - 1 - shift] = comb(p - 1 + k, k) * term
        total += padded
    roots = np.roots(total)
    inside = [r for r in roots if abs(r) < 1.0]
    if len(inside) != p - 1:
        raise RuntimeError(f"spectral factorization failed for moments={p}")
    h = np.array([1.0])
    for _ in range(p):
        h = np.convolve(h, [0.5, 0.5])
    for r in inside:
        h = np.convolve(h, np.array([1.0, -r]) / (1.0 - r))
    h = np.real(h)
    h *= np.sqrt(2.0) / h.sum()
    h.setflags(write=False)
    return h


def quadrature_mirror(h: np.ndarray) -> np.ndarray:
    """Highpass analysis filter paired with scaling filter ``h``."""
    g = ((-1.0) ** np.arange(len(h))) * h[::-1]
    g.setflags(write=False)
    return g


# ---------------------------------------------------------------------------
# periodized filter bank


def _analyze_axis(x: np.ndarray, h: np.ndarray, g: np.ndarray, axis: int):
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(h))[None, :]) % n
    windows = x[..., idx]
    lo = windows @ h
    hi = windows @ g
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesize_axis(lo: np.ndarray, hi: np.ndarray, h: np.ndarray, g: np.ndarray, axis: int):
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    n = 2 * lo.shape[-1]
    out = np.zeros(lo.shape[:-1] + (n,))
    starts = 2 * np.arange(n // 2)
    for tap in range(len(h)):
        pos = (starts + tap) % n
        out[..., pos] += lo * h[tap] + hi * g[tap]
    return np.moveaxis(out, -1, axis)


@dataclass
class WaveletPyramid:
    """Critically sampled decomposition: per level three detail subbands
    (horizontal, vertical, diagonal) plus one final approximation subband.
    """

    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    approx: np.ndarray
    moments: int = 8

    @property
    def levels(self) -> int:
        return len(self.details)

    def coefficient_count(self) -> int:
        n = self.approx.size
        for bands in self.details:
            n += sum(b.size for b in bands)
        return n

    def validate(self) -> None:
        if not self.details:
            raise MalformedPyramid("pyramid has no detail levels")
        h, w = self.approx.shape
        for lh, hl, hh in reversed(self.details):
            h, w = 2 * h, 2 * w
            for band in (lh, hl, hh):
                if band.shape != (h // 2, w // 2):
                    raise MalformedPyramid(
                        f"subband shape {band.shape} != expected {(h // 2, w // 2)}"
                    )

    def map_details(self, fn) -> "WaveletPyramid":
        """New pyramid with ``fn`` applied to every detail subband."""
        return WaveletPyramid(
            [tuple(fn(b) for b in bands) for bands in self.details],
            self.approx.copy(),
            self.moments,
        )


def dwt2(image: np.ndarray, levels: int = 4, moments: int = 8) -> WaveletPyramid:
    """Forward 2-D wavelet decomposition.

    Periodic boundary handling keeps the transform orthonormal, so each
    dimension must be divisible by ``2 ** levels``.
    """
    if levels < 1:
        raise TooManyLevels("levels must be >= 1")
    a = np.asarray(image, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D image, got shape {a.shape}")
    h_len, w_len = a.shape
    div = 1 << levels
    if min(h_len, w_len) < div or h_len % div or w_len % div:
        raise TooManyLevels(
            f"image {a.shape} does not support {levels} periodized levels"
        )
    h = daubechies_filter(moments)
    g = quadrature_mirror(h)
    details = []
    for _ in range(levels):
        lo, hi = _analyze_axis(a, h, g, 0)
        ll, lh = _analyze_axis(lo, h, g, 1)
        hl, hh = _analyze_axis(hi, h, g, 1)
        details.append((lh, hl, hh))
        a = ll
    return WaveletPyramid(details, a, moments)


def idwt2(pyramid: WaveletPyramid) -> np.ndarray:
    """Inverse of :func:`dwt2`; perfect reconstruction within 1e-4."""
    pyramid.validate()
    h = daubechies_filter(pyramid.moments)
    g = quadrature_mirror(h)
    a = np.asarray(pyramid.approx, dtype=np.float64)
    for lh, hl, hh in reversed(pyramid.details):
        lo = _synthesize_axis(a, np.asarray(lh, float), h, g, 1)
        hi = _synthesize_axis(np.asarray(hl, float), np.asarray(hh, float), h, g, 1)
        a = _synthesize_axis(lo, hi, h, g, 0)
    return a.astype(np.float32)


# ---------------------------------------------------------------------------
# blockwise DCT


@lru_cache(maxsize=1)
def _dct8_matrix() -> np.ndarray:
    k, n = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    d = np.cos(np.pi * (2 * n + 1) * k / 16.0) * np.sqrt(2.0 / 8.0)
    d[0] /= np.sqrt(2.0)
    d.setflags(write=False)
    return d


def block_dct8(image: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Orthonormal type-II DCT applied independently to each 8x8 tile.

    Forward maps pixels to a coefficient raster of the same shape; with
    ``inverse=True`` it maps coefficients back, an exact round trip.
    """
    a = np.asarray(image, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D image, got shape {a.shape}")
    hh, ww = a.shape
    if hh % 8 or ww % 8:
        raise NotTileable(f"image {a.shape} is not divisible into 8x8 tiles")
    d = _dct8_matrix()
    m = d.T if inverse else d
    blocks = a.reshape(hh // 8, 8, ww // 8, 8)
    out = np.einsum("ia,hawb,jb->hiwj", m, blocks, m, optimize=True)
    return out.reshape(hh, ww).astype(np.float32)


# ---------------------------------------------------------------------------
# circular cross-correlation


@dataclass
class CorrelationSurface:
    """Normalized circular cross-correlation at every shift.

    ``peak_location`` indexes the maximum absolute value; for two copies of
    the same signal it sits at shift (0, 0).
    """

    values: np.ndarray
    peak_location: tuple[int, int]

    @property
    def peak(self) -> float:
        return float(self.values[self.peak_location])


def xcorr2(a: np.ndarray, b: np.ndarray) -> CorrelationSurface:
    """Circular normalized cross-correlation of mean-removed inputs.

    surface[s] = sum_p a0(p) * b0(p + s) / (||a0|| * ||b0||), computed in
    the frequency domain. If either input is constant the surface is
    identically zero.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} must match")
    a0 = a - a.mean()
    b0 = b - b.mean()
    norm = np.linalg.norm(a0) * np.linalg.norm(b0)
    if norm == 0.0:
        surface = np.zeros_like(a0)
        return CorrelationSurface(surface, (0, 0))
    surface = np.fft.ifft2(np.conj(np.fft.fft2(a0)) * np.fft.fft2(b0)).real / norm
    loc = np.unravel_index(np.argmax(np.abs(surface)), surface.shape)
    return CorrelationSurface(surface, (int(loc[0]), int(loc[1])))
