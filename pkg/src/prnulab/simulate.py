"""Synthetic sensor simulator.

Captures follow the multiplicative model out = (1 + pattern) * scene +
additive noise, clamped to the 8-bit range, so detection and attack efficacy
are verifiable at desk scale without a real photo corpus.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .config import ToolkitConfig, DEFAULT_CONFIG
from .errors import DimensionMismatch
from .imaging import CameraDataset, save_png

# seed-stream tags keeping sensor, scene and capture noise independent
_SENSOR_STREAM = 101
_SCENE_STREAM = 202
_CAPTURE_STREAM = 303


@dataclass
class SyntheticSensor:
    """Planted per-pixel multiplicative pattern of one simulated camera."""

    pattern: np.ndarray
    strength: float
    sensor_id: str
    seed: int


def make_sensor(height: int, width: int, strength: float, seed: int,
                sensor_id: str | None = None) -> SyntheticSensor:
    """i.i.d. zero-mean Gaussian pattern with std = strength."""
    if strength <= 0:
        raise ValueError("strength must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([_SENSOR_STREAM, int(seed)]))
    pattern = rng.normal(0.0, strength, size=(height, width))
    return SyntheticSensor(
        pattern=pattern.astype(np.float64),
        strength=float(strength),
        sensor_id=sensor_id if sensor_id is not None else f"sensor{seed:04d}",
        seed=int(seed),
    )


def capture(scene: np.ndarray, sensor: SyntheticSensor, additive_sigma: float,
            seed: int) -> np.ndarray:
    """One exposure: multiplicative pattern times the scene plus white
    Gaussian readout noise, clamped to [0, 255]."""
    sc = np.asarray(scene, dtype=np.float64)
    if sc.shape != sensor.pattern.shape:
        raise DimensionMismatch(f"scene {sc.shape} vs sensor {sensor.pattern.shape}")
    if additive_sigma < 0:
        raise ValueError("additive_sigma must be >= 0")
    out = (1.0 + sensor.pattern) * sc
    if additive_sigma > 0:
        rng = np.random.default_rng(np.random.SeedSequence([_CAPTURE_STREAM, int(seed)]))
        out += rng.normal(0.0, additive_sigma, size=sc.shape)
    return np.clip(out, 0.0, 255.0).astype(np.float32)


SCENE_KINDS = ("flat", "gradient", "texture")


def make_scene(
    height: int,
    width: int,
    kind: str,
    seed: int = 0,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Deterministic test content.

    flat: constant 128. gradient: horizontal ramp 32..224. texture: a
    smoothed random field (broad blobs plus an enveloped mid-frequency band
    and fine grain) rescaled to [16, 240], with a brightness skew so the
    mean sits in the photographic range.
    """
    if kind == "flat":
        return np.full((height, width), 128.0, dtype=np.float32)
    if kind == "gradient":
        ramp = np.linspace(32.0, 224.0, width, dtype=np.float64)
        return np.tile(ramp, (height, 1)).astype(np.float32)
    if kind != "texture":
        raise ValueError(f"unknown scene kind {kind!r}")
    rng = np.random.default_rng(np.random.SeedSequence([_SCENE_STREAM, int(seed)]))
    blobs = gaussian_filter(rng.normal(size=(height, width)), config.scene_blob_sigma, mode="wrap")
    blobs /= blobs.std()
    white = rng.normal(size=(height, width))
    band = (
        gaussian_filter(white, config.scene_band_sigma_lo, mode="wrap")
        - gaussian_filter(white, config.scene_band_sigma_hi, mode="wrap")
    )
    band /= band.std()
    envelope = gaussian_filter(rng.normal(size=(height, width)), 1.5 * config.scene_blob_sigma, mode="wrap")
    envelope = np.abs(envelope) / np.abs(envelope).std()
    field = blobs + config.scene_band_amplitude * band * envelope
    field += config.scene_grain * rng.normal(size=(height, width))
    unit = (field - field.min()) / (field.max() - field.min())
    return (16.0 + 224.0 * unit ** config.scene_brightness_gamma).astype(np.float32)


def materialize_dataset(
    root: str | Path,
    cameras: int,
    images: int,
    size: int,
    seed: int,
    config: ToolkitConfig = DEFAULT_CONFIG,
    scene_kind: str = "texture",
) -> CameraDataset:
    """Write a synthetic camera dataset in the standard directory layout
    (root/<camera_id>/<image>.png) so the bench harness is agnostic to real
    versus simulated data. Returns the discovered dataset description."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for cam in range(cameras):
        cam_id = f"cam{cam:02d}"
        sensor = make_sensor(size, size, config.sensor_strength,
                             seed=seed * 1000 + cam, sensor_id=cam_id)
        cam_dir = root / cam_id
        cam_dir.mkdir(exist_ok=True)
        paths = []
        for idx in range(images):
            scene_seed = ((seed * 1000 + cam) << 16) + idx
            scene = make_scene(size, size, scene_kind, seed=scene_seed, config=config)
            shot = capture(scene, sensor, config.additive_sigma, seed=scene_seed)
            path = cam_dir / f"img{idx:03d}.png"
            save_png(shot, path)
            paths.append(path)
        entries.append((cam_id, paths))
    return CameraDataset(entries)
