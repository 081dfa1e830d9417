"""Benchmark harness: training splits, clean vs fooled protocols, confusion
matrices, error rates, SNR aggregation, timing, and report emission.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attacks import AttackSpec, apply_attack
from .config import ToolkitConfig, DEFAULT_CONFIG, TOOLKIT_VERSION
from .errors import ReportInvariantBroken, TooFewImages
from .fingerprint import estimate_fingerprint, pce_from_residual
from .denoise import noise_residual
from .imaging import CameraDataset, load_image, preprocess, snr_db

# attacks that move pixels: their SNR compares pixels at identical positions
# and is therefore pessimistic relative to perceived quality
GEOMETRIC_KINDS = {
    "scramble", "rotate", "rescale",
    "combo_noise_geom", "combo_wiener_rotate_deblur", "definite",
}

_TRAIN_STREAM = 11
_TEST_STREAM = 22


@dataclass
class SplitPlan:
    """Per camera: the first ceil(count / 4) paths train, the rest test."""

    cameras: list[tuple[str, list, list]]  # (camera_id, train, test)

    @property
    def camera_ids(self) -> list[str]:
        return [cid for cid, _, _ in self.cameras]


def training_count(total: int) -> int:
    return -(-total // 4)  # ceil(total / 4)


def make_split(dataset: CameraDataset) -> SplitPlan:
    cameras = []
    for cam_id, paths in dataset.cameras:
        if len(paths) < 4:
            raise TooFewImages(f"camera {cam_id!r} has {len(paths)} images, needs >= 4")
        n_t = training_count(len(paths))
        cameras.append((cam_id, list(paths[:n_t]), list(paths[n_t:])))
    return SplitPlan(cameras)


def resolve_dataset(dataset: CameraDataset, config: ToolkitConfig = DEFAULT_CONFIG):
    """Load and preprocess every image of an on-disk dataset into memory."""
    return [
        (cam_id, [preprocess(load_image(p), config.crop_size) for p in paths])
        for cam_id, paths in dataset.cameras
    ]


@dataclass
class BenchReport:
    attack: dict | None
    training_mode: str
    camera_ids: list[str]
    confusion: list[list[int]]
    error_rate: float
    per_camera_error: dict[str, float]
    mean_snr_db: float | None
    mean_attack_seconds: float | None
    chance_error: float
    successful: bool
    seed: int
    config: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    toolkit_version: str = TOOLKIT_VERSION

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "training_mode": self.training_mode,
            "camera_ids": list(self.camera_ids),
            "confusion": [list(map(int, row)) for row in self.confusion],
            "error_rate": self.error_rate,
            "per_camera_error": dict(self.per_camera_error),
            "mean_snr_db": self.mean_snr_db,
            "mean_attack_seconds": self.mean_attack_seconds,
            "chance_error": self.chance_error,
            "successful": self.successful,
            "seed": self.seed,
            "config": self.config,
            "notes": list(self.notes),
            "toolkit_version": self.toolkit_version,
        }

    def validate(self) -> None:
        c = np.asarray(self.confusion, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != len(self.camera_ids):
            raise ReportInvariantBroken("confusion matrix shape inconsistent")
        total = int(c.sum())
        if total == 0:
            raise ReportInvariantBroken("confusion matrix is empty")
        expected = 1.0 - np.trace(c) / total
        if abs(expected - self.error_rate) > 1e-9:
            raise ReportInvariantBroken(
                f"error_rate {self.error_rate} != 1 - trace/total {expected}"
            )
        chance = 1.0 - 1.0 / len(self.camera_ids)
        if abs(chance - self.chance_error) > 1e-12:
            raise ReportInvariantBroken("chance_error inconsistent with camera count")


def _derived_seed(master: int, stream: int, cam_index: int, img_index: int) -> int:
    ss = np.random.SeedSequence([int(master), stream, cam_index, img_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_experiment(
    data,
    attack: AttackSpec | None,
    training_mode: str = "clean",
    seed: int = 0,
    config: ToolkitConfig = DEFAULT_CONFIG,
    include_timing: bool = False,
) -> BenchReport:
    """Train fingerprints, identify every test image, assemble the report.

    ``data`` is either a :class:`CameraDataset` (loaded from disk) or an
    already-resolved list of (camera_id, [gray images]). In fooled mode the
    training images are attacked before estimation, with per-image random
    streams derived from (seed, stream, camera, index) so training and test
    realizations stay independent. With no attack the two modes coincide and
    the report is normalized to ``clean``.
    """
    if training_mode not in ("clean", "fooled"):
        raise ValueError(f"training_mode must be clean or fooled, got {training_mode!r}")
    if attack is None:
        training_mode = "clean"
    if isinstance(data, CameraDataset):
        data = resolve_dataset(data, config)

    camera_ids = [cid for cid, _ in data]
    n_cams = len(camera_ids)
    chance = 1.0 - 1.0 / n_cams
    notes: list[str] = []

    def attacked(image, stream, cam_index, img_index):
        spec = attack.with_seed(_derived_seed(seed, stream, cam_index, img_index))
        return apply_attack(image, spec, config)

    # training
    patterns = []
    for ci, (cam_id, images) in enumerate(data):
        if len(images) < 4:
            raise TooFewImages(f"camera {cam_id!r} has {len(images)} images, needs >= 4")
        n_t = training_count(len(images))
        train = images[:n_t]
        if attack is not None and training_mode == "fooled":
            train = [attacked(im, _TRAIN_STREAM, ci, i) for i, im in enumerate(train)]
        patterns.append(
            estimate_fingerprint(
                train, cam_id,
                sigma0=config.sigma0_extract,
                levels=config.wavelet_levels,
                moments=config.wavelet_moments,
                epsilon=config.estimator_epsilon,
            )
        )

    # identification over the held-out images
    confusion = np.zeros((n_cams, n_cams), dtype=np.int64)
    snrs: list[float] = []
    attack_seconds: list[float] = []
    for ci, (cam_id, images) in enumerate(data):
        n_t = training_count(len(images))
        for ii, original in enumerate(images[n_t:]):
            probe = original
            if attack is not None:
                t0 = time.perf_counter()
                probe = attacked(original, _TEST_STREAM, ci, ii)
                attack_seconds.append(time.perf_counter() - t0)
                snrs.append(snr_db(original, probe))
            residual = noise_residual(
                probe, config.sigma0_extract, config.wavelet_levels, config.wavelet_moments
            )
            best, best_pce = 0, None
            for pi, pattern in enumerate(patterns):
                score = pce_from_residual(residual, probe, pattern, config.pce_exclusion)
                if best_pce is None or score.pce > best_pce:
                    best, best_pce = pi, score.pce
            confusion[ci, best] += 1

    total = int(confusion.sum())
    error_rate = 1.0 - float(np.trace(confusion)) / total
    per_camera = {
        cid: 1.0 - float(confusion[i, i]) / float(confusion[i].sum())
        for i, cid in enumerate(camera_ids)
    }
    mean_snr = float(np.mean(snrs)) if snrs else None
    if attack is not None and attack.kind in GEOMETRIC_KINDS:
        notes.append(
            "geometric attack: SNR compares pixels at identical positions and "
            "understates perceived quality"
        )
    mean_seconds = float(np.mean(attack_seconds)) if (include_timing and attack_seconds) else None

    attack_dict = None
    if attack is not None:
        attack_dict = {"kind": attack.kind, "params": dict(attack.params), "label": attack.label()}

    report = BenchReport(
        attack=attack_dict,
        training_mode=training_mode,
        camera_ids=camera_ids,
        confusion=[list(map(int, row)) for row in confusion],
        error_rate=error_rate,
        per_camera_error=per_camera,
        mean_snr_db=mean_snr,
        mean_attack_seconds=mean_seconds,
        chance_error=chance,
        successful=bool(error_rate >= chance),
        seed=int(seed),
        config=config.as_dict(),
        notes=notes,
    )
    report.validate()
    return report


# ---------------------------------------------------------------------------
# emission


def report_json(reports: BenchReport | list[BenchReport]) -> str:
    if isinstance(reports, BenchReport):
        payload = reports.to_dict()
    else:
        payload = {"runs": [r.to_dict() for r in reports]}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def report_csv(reports: BenchReport | list[BenchReport]) -> str:
    """Summary table: attack,snr_db,seconds,error_clean,error_fooled."""
    if isinstance(reports, BenchReport):
        reports = [reports]
    rows: dict[str, dict] = {}
    order: list[str] = []
    for rep in reports:
        label = rep.attack["label"] if rep.attack else "none"
        if label not in rows:
            rows[label] = {"snr": rep.mean_snr_db, "seconds": rep.mean_attack_seconds}
            order.append(label)
        rows[label][f"error_{rep.training_mode}"] = rep.error_rate
        if rep.mean_attack_seconds is not None:
            rows[label]["seconds"] = rep.mean_attack_seconds
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["attack", "snr_db", "seconds", "error_clean", "error_fooled"])

    def fmt(value):
        return "" if value is None else repr(float(value))

    for label in order:
        row = rows[label]
        writer.writerow([
            label,
            fmt(row.get("snr")),
            fmt(row.get("seconds")),
            fmt(row.get("error_clean")),
            fmt(row.get("error_fooled")),
        ])
    return buf.getvalue()


def write_report(reports: BenchReport | list[BenchReport], path: str | Path) -> None:
    """Emit the JSON report and its CSV summary table next to it.

    Re-validates every report first; byte-stable for fixed inputs.
    """
    for rep in [reports] if isinstance(reports, BenchReport) else reports:
        rep.validate()
    path = Path(path)
    path.write_text(report_json(reports))
    path.with_suffix(".csv").write_text(report_csv(reports))
