"""Toolkit configuration: one flat record of every tunable default.

Values can be overridden from a config file (JSON object or ``key=value``
lines) and again from CLI flags; flags win.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

TOOLKIT_VERSION = "0.1.0"


@dataclass(frozen=True)
class ToolkitConfig:
    # preprocessing
    crop_size: int = 2048

    # wavelet decomposition used for extraction and denoising
    wavelet_moments: int = 8
    wavelet_levels: int = 4

    # noise std assumed by the wavelet-domain Wiener shrinkage, in 0..255
    # pixel units; the attack role removes more aggressively than the
    # extraction role
    sigma0_extract: float = 2.0
    sigma0_attack: float = 3.0
    variance_windows: tuple[int, ...] = (3, 5, 7, 9)

    # detection
    pce_exclusion: int = 11
    estimator_epsilon: float = 1.0

    # attack defaults
    lsb_bits: int = 3
    dct_noise_scale: float = 1.0 / 35.0
    scramble_radius: int = 1
    scramble_sigma_ratio: float = 0.5
    rotate_alpha_deg: float = 10.0
    rotate_beta_deg: float = 0.5
    rescale_factor: int = 3
    spatial_wiener_window: int = 3
    combo_scramble_radius: int = 2
    deblur_psf_size: int = 3
    deblur_psf_sigma: float = 0.8
    deblur_iterations: int = 10
    definite_margin_extra: int = 2

    # synthetic sensor simulator
    sensor_strength: float = 0.02
    additive_sigma: float = 2.0
    scene_blob_sigma: float = 5.66
    scene_band_sigma_lo: float = 1.1
    scene_band_sigma_hi: float = 2.2
    scene_band_amplitude: float = 0.3
    scene_grain: float = 0.02
    scene_brightness_gamma: float = 0.7

    def replace(self, **overrides) -> "ToolkitConfig":
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["variance_windows"] = list(self.variance_windows)
        d["toolkit_version"] = TOOLKIT_VERSION
        return d


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ToolkitConfig)}


def _coerce(name: str, value):
    if name not in _FIELD_TYPES:
        raise KeyError(f"unknown config key: {name!r}")
    current = getattr(ToolkitConfig(), name)
    if isinstance(current, tuple):
        if isinstance(value, str):
            value = [int(v) for v in value.replace(",", " ").split()]
        return tuple(int(v) for v in value)
    return type(current)(value)


def load_config(path: str | Path | None, **overrides) -> ToolkitConfig:
    """Build a config from an optional file plus keyword overrides.

    The file may be a JSON object or plain ``key=value`` lines ('#' starts a
    comment). Overrides passed by the caller (CLI flags) take precedence.
    """
    values: dict = {}
    if path is not None:
        text = Path(path).read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            raw = json.loads(text)
        else:
            raw = {}
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                if not _:
                    raise ValueError(f"bad config line: {line!r}")
                raw[key.strip()] = val.strip()
        for key, val in raw.items():
            values[key] = _coerce(key, val)
    for key, val in overrides.items():
        if val is not None:
            values[key] = _coerce(key, val)
    return ToolkitConfig(**values)


DEFAULT_CONFIG = ToolkitConfig()
