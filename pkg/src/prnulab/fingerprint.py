"""Sensor-pattern estimation, the peak-to-correlation-energy detector, and
source camera identification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import TOOLKIT_VERSION
from .denoise import noise_residual
from .errors import DimensionMismatch, EmptyTrainingSet, NoPatterns
from .imaging import as_gray
from .transforms import xcorr2


@dataclass
class FingerprintPattern:
    """Per-pixel sensor-pattern estimate for one camera (zero mean)."""

    values: np.ndarray
    camera_id: str
    training_count: int
    params: dict | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class PceScore:
    """Signed peak-to-correlation-energy plus the peak's shift.

    The sign follows the correlation peak; a genuine aligned match peaks at
    shift (0, 0).
    """

    pce: float
    peak_shift: tuple[int, int]


def estimate_fingerprint(
    images: list[np.ndarray],
    camera_id: str,
    sigma0: float = 2.0,
    levels: int = 4,
    moments: int = 8,
    epsilon: float = 1.0,
) -> FingerprintPattern:
    """Maximum-likelihood weighted estimate from a training set.

    K = sum_i W_i * I_i / (sum_i I_i^2 + epsilon), where W_i is the noise
    residual of image I_i; the result is mean-subtracted. ``epsilon``
    stabilizes near-black pixels.
    """
    if not images:
        raise EmptyTrainingSet("need at least one training image")
    first = as_gray(images[0])
    num = np.zeros(first.shape, dtype=np.float64)
    den = np.zeros(first.shape, dtype=np.float64)
    for image in images:
        img = as_gray(image)
        if img.shape != first.shape:
            raise DimensionMismatch(f"training image {img.shape} != {first.shape}")
        w = noise_residual(img, sigma0, levels, moments).astype(np.float64)
        img64 = img.astype(np.float64)
        num += w * img64
        den += img64 * img64
    pattern = num / (den + epsilon)
    pattern -= pattern.mean()
    return FingerprintPattern(
        values=pattern.astype(np.float32),
        camera_id=camera_id,
        training_count=len(images),
        params={"sigma0": sigma0, "levels": levels, "moments": moments, "epsilon": epsilon},
    )


def pce_from_residual(residual: np.ndarray, image: np.ndarray,
                      pattern: FingerprintPattern, exclusion: int = 11) -> PceScore:
    """PCE of a precomputed residual against one candidate pattern.

    The correlation surface is residual vs image*pattern; the statistic is
    sign(peak) * peak^2 over the mean squared surface outside an
    ``exclusion`` x ``exclusion`` neighborhood around the peak (circular).
    """
    img = as_gray(image)
    if pattern.values.shape != img.shape:
        raise DimensionMismatch(f"pattern {pattern.values.shape} vs image {img.shape}")
    surface = xcorr2(residual, img.astype(np.float64) * pattern.values)
    values = surface.values
    if not values.any():
        return PceScore(pce=0.0, peak_shift=(0, 0))
    py, px = surface.peak_location
    peak = values[py, px]
    half = exclusion // 2
    mask = np.ones(values.shape, dtype=bool)
    ys = (np.arange(-half, half + 1) + py) % values.shape[0]
    xs = (np.arange(-half, half + 1) + px) % values.shape[1]
    mask[np.ix_(ys, xs)] = False
    if not mask.any():
        return PceScore(pce=0.0, peak_shift=(py, px))
    floor = float((values[mask] ** 2).mean())
    if floor == 0.0:
        return PceScore(pce=0.0, peak_shift=(py, px))
    return PceScore(pce=float(np.sign(peak) * peak * peak / floor), peak_shift=(py, px))


def pce(image: np.ndarray, pattern: FingerprintPattern, exclusion: int = 11,
        sigma0: float = 2.0, levels: int = 4, moments: int = 8) -> PceScore:
    """Extract the image's noise residual and score it against ``pattern``."""
    residual = noise_residual(as_gray(image), sigma0, levels, moments)
    return pce_from_residual(residual, image, pattern, exclusion)


def pce_scores(image: np.ndarray, patterns: list[FingerprintPattern],
               exclusion: int = 11, sigma0: float = 2.0, levels: int = 4,
               moments: int = 8) -> list[PceScore]:
    """Score one image against many patterns, extracting the residual once."""
    if not patterns:
        raise NoPatterns("need at least one candidate pattern")
    residual = noise_residual(as_gray(image), sigma0, levels, moments)
    return [pce_from_residual(residual, image, p, exclusion) for p in patterns]


def identify(image: np.ndarray, patterns: list[FingerprintPattern],
             exclusion: int = 11, sigma0: float = 2.0, levels: int = 4,
             moments: int = 8) -> str:
    """Camera id of the highest-PCE pattern; ties keep the first in list order."""
    scores = pce_scores(image, patterns, exclusion, sigma0, levels, moments)
    best = 0
    for i in range(1, len(scores)):
        if scores[i].pce > scores[best].pce:
            best = i
    return patterns[best].camera_id


# ---------------------------------------------------------------------------
# persistence: flat little-endian float32 array plus a JSON sidecar


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def save_fingerprint(pattern: FingerprintPattern, path: str | Path) -> None:
    path = Path(path)
    data = np.ascontiguousarray(pattern.values, dtype="<f4")
    path.write_bytes(data.tobytes())
    meta = {
        "camera_id": pattern.camera_id,
        "height": int(pattern.values.shape[0]),
        "width": int(pattern.values.shape[1]),
        "training_count": int(pattern.training_count),
        "toolkit_version": TOOLKIT_VERSION,
        "params": pattern.params or {},
    }
    _sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_fingerprint(path: str | Path) -> FingerprintPattern:
    path = Path(path)
    meta = json.loads(_sidecar(path).read_text())
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    values = raw.reshape(meta["height"], meta["width"]).copy()
    return FingerprintPattern(
        values=values,
        camera_id=meta["camera_id"],
        training_count=meta["training_count"],
        params=meta.get("params") or None,
    )
