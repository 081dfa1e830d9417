"""Image decoding, orientation + crop preprocessing, pixel-domain quality
metrics and on-disk camera dataset discovery.

The pixel currency everywhere is a 2-D float32 array of luminance values in
[0, 255]. Transforms may take values transiently outside that range; anything
written to disk or handed to an attack is clamped first.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatch, ImageTooSmall, TooFewImages

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def as_gray(image: np.ndarray) -> np.ndarray:
    """Validate and convert to the 2-D float32 pixel currency."""
    a = np.asarray(image, dtype=np.float32)
    if a.ndim != 2 or a.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D image, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("image contains non-finite values")
    return a


def clamp(image: np.ndarray) -> np.ndarray:
    return np.clip(image, 0.0, 255.0).astype(np.float32)


def to_luminance(raw: np.ndarray) -> np.ndarray:
    """Collapse a (H, W) or (H, W, 3+) raster to BT.601 luminance."""
    a = np.asarray(raw, dtype=np.float64)
    if a.ndim == 2:
        return a.astype(np.float32)
    if a.ndim == 3 and a.shape[2] >= 3:
        y = a[:, :, 0] * LUMA_WEIGHTS[0] + a[:, :, 1] * LUMA_WEIGHTS[1] + a[:, :, 2] * LUMA_WEIGHTS[2]
        return y.astype(np.float32)
    raise DimensionMismatch(f"cannot interpret shape {a.shape} as an image")


def center_crop(image: np.ndarray, size: int) -> np.ndarray:
    h, w = image.shape[:2]
    if min(h, w) < size:
        raise ImageTooSmall(f"image {h}x{w} smaller than crop {size}")
    top = (h - size) // 2
    left = (w - size) // 2
    return image[top: top + size, left: left + size]


def preprocess(raw: np.ndarray, crop_size: int) -> np.ndarray:
    """Orientation-normalize, center-crop and gray-convert a decoded image.

    Portrait inputs (height > width) are first turned 90 degrees clockwise so
    every image is in landscape format, then a centered ``crop_size`` square
    is cut and reduced to luminance. Raises :class:`ImageTooSmall` when the
    smaller dimension cannot accommodate the crop, which marks the source
    camera as ineligible.
    """
    a = np.asarray(raw)
    if a.ndim not in (2, 3):
        raise DimensionMismatch(f"cannot interpret shape {a.shape} as an image")
    if min(a.shape[0], a.shape[1]) < crop_size:
        raise ImageTooSmall(
            f"image {a.shape[0]}x{a.shape[1]} smaller than crop {crop_size}"
        )
    if a.shape[0] > a.shape[1]:
        a = np.rot90(a, k=-1, axes=(0, 1))  # clockwise quarter turn
    a = center_crop(a, crop_size)
    return to_luminance(a)


def snr_db(original: np.ndarray, processed: np.ndarray) -> float:
    """10 log10(sum orig^2 / sum (orig - processed)^2); +inf when identical."""
    a = as_gray(original).astype(np.float64)
    b = as_gray(processed).astype(np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} must match")
    noise = ((a - b) ** 2).sum()
    if noise == 0.0:
        return float("inf")
    return float(10.0 * np.log10((a ** 2).sum() / noise))


# ---------------------------------------------------------------------------
# file IO


def load_image(path: str | Path) -> np.ndarray:
    """Decode a JPEG/PNG file; color images come back as (H, W, 3) uint8."""
    with Image.open(path) as img:
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        return np.asarray(img)


def load_gray(path: str | Path) -> np.ndarray:
    """Decode and reduce to luminance without cropping."""
    return to_luminance(load_image(path))


def save_png(image: np.ndarray, path: str | Path) -> None:
    """Write a gray image losslessly; values are clamped and rounded."""
    data = np.rint(clamp(as_gray(image))).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path, format="PNG")


# ---------------------------------------------------------------------------
# camera datasets


@dataclass
class CameraDataset:
    """Ordered (camera_id, image paths) pairs; ordering is lexicographic so
    training splits are reproducible."""

    cameras: list[tuple[str, list[Path]]]

    @property
    def camera_ids(self) -> list[str]:
        return [cid for cid, _ in self.cameras]


def discover_dataset(root: str | Path, min_images: int = 4) -> CameraDataset:
    """Scan ``root/<camera_id>/<images>`` into a dataset.

    Camera directories and filenames are sorted lexicographically. Each
    camera needs at least ``min_images`` files so the 1/4 training split is
    non-empty.
    """
    root = Path(root)
    if not root.is_dir():
        raise TooFewImages(f"dataset root {root} is not a directory")
    cameras = []
    for child in sorted(root.iterdir(), key=lambda p: p.name):
        if not child.is_dir():
            continue
        paths = sorted(
            (p for p in child.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
            key=lambda p: p.name,
        )
        if len(paths) < min_images:
            raise TooFewImages(
                f"camera {child.name!r} has {len(paths)} images, needs >= {min_images}"
            )
        cameras.append((child.name, paths))
    if not cameras:
        raise TooFewImages(f"no camera directories found under {root}")
    return CameraDataset(cameras)
