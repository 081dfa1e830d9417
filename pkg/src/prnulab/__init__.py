"""Camera sensor-pattern forensics: fingerprint estimation, PCE matching,
counter-forensic attacks, and a seeded robustness benchmark."""

from .config import ToolkitConfig, DEFAULT_CONFIG, TOOLKIT_VERSION, load_config
from .imaging import CameraDataset, discover_dataset, preprocess, snr_db
from .transforms import CorrelationSurface, WaveletPyramid, block_dct8, dwt2, idwt2, xcorr2
from .denoise import (
    DenoiseResult,
    PointSpreadFunction,
    gaussian_psf,
    lucy_richardson,
    noise_residual,
    spatial_wiener,
    wavelet_wiener,
)
from .fingerprint import (
    FingerprintPattern,
    PceScore,
    estimate_fingerprint,
    identify,
    load_fingerprint,
    pce,
    pce_scores,
    save_fingerprint,
)
from .attacks import ATTACK_KINDS, AttackSpec, apply_attack, default_attack_specs, default_params
from .simulate import SyntheticSensor, capture, make_scene, make_sensor, materialize_dataset
from .bench import BenchReport, SplitPlan, make_split, run_experiment, write_report

__version__ = TOOLKIT_VERSION

__all__ = [
    "ATTACK_KINDS",
    "AttackSpec",
    "BenchReport",
    "CameraDataset",
    "CorrelationSurface",
    "DEFAULT_CONFIG",
    "DenoiseResult",
    "FingerprintPattern",
    "PceScore",
    "PointSpreadFunction",
    "SplitPlan",
    "SyntheticSensor",
    "TOOLKIT_VERSION",
    "ToolkitConfig",
    "WaveletPyramid",
    "apply_attack",
    "block_dct8",
    "capture",
    "default_attack_specs",
    "default_params",
    "discover_dataset",
    "dwt2",
    "estimate_fingerprint",
    "gaussian_psf",
    "identify",
    "idwt2",
    "load_config",
    "load_fingerprint",
    "lucy_richardson",
    "make_scene",
    "make_sensor",
    "make_split",
    "materialize_dataset",
    "noise_residual",
    "pce",
    "pce_scores",
    "preprocess",
    "run_experiment",
    "save_fingerprint",
    "snr_db",
    "spatial_wiener",
    "wavelet_wiener",
    "write_report",
    "xcorr2",
]
