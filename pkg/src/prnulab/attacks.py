"""Counter-forensic attack catalog behind a uniform seeded dispatch.

Every attack maps a gray image to a gray image of the same shape, clamped to
[0, 255], and is bit-deterministic for a fixed (image, spec) pair including
the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ToolkitConfig, DEFAULT_CONFIG
from .denoise import PointSpreadFunction, gaussian_psf, lucy_richardson, spatial_wiener, wavelet_wiener
from .errors import InvalidSpec
from .imaging import as_gray, clamp
from .resample import resize_lanczos, rotate_image
from .transforms import block_dct8

# 8x8 perceptual quantization table bounding the DCT-domain noise (luminance
# table of the JPEG standard's informative annex); overridable from config
PERCEPTUAL_QUANT_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)
PERCEPTUAL_QUANT_TABLE.setflags(write=False)

ATTACK_KINDS = (
    "lsb",
    "dct_noise",
    "scramble",
    "rotate",
    "rescale",
    "spatial_wiener",
    "wavelet_wiener",
    "combo_noise_geom",
    "combo_wiener_rotate_deblur",
    "definite",
)


@dataclass
class AttackSpec:
    """Tagged description of one attack: kind, parameter record, seed."""

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def with_seed(self, seed: int) -> "AttackSpec":
        return AttackSpec(self.kind, dict(self.params), int(seed))

    def label(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.kind}({inner})"


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


# ---------------------------------------------------------------------------
# noise addition / modification


def attack_lsb(image: np.ndarray, bits: int, rng: np.random.Generator) -> np.ndarray:
    """Replace the ``bits`` least significant bits of each rounded pixel with
    uniform random bits. bits=0 is a degenerate test hook (identity)."""
    if not 0 <= bits <= 7:
        raise InvalidSpec(f"lsb bits {bits} outside 0..7")
    q = np.clip(np.rint(image), 0, 255).astype(np.int64)
    if bits == 0:
        return q.astype(np.float32)
    mask = (1 << bits) - 1
    fresh = rng.integers(0, mask + 1, size=q.shape)
    return ((q & ~mask) | fresh).astype(np.float32)


def attack_dct_noise(
    image: np.ndarray,
    rng: np.random.Generator,
    table: np.ndarray | None = None,
    scale: float = DEFAULT_CONFIG.dct_noise_scale,
) -> np.ndarray:
    """Add independent uniform noise to every 8x8 DCT coefficient, with the
    per-position half-range ``table[u, v] * scale / 2``."""
    tab = PERCEPTUAL_QUANT_TABLE if table is None else np.asarray(table, dtype=np.float64)
    if tab.shape != (8, 8):
        raise InvalidSpec("quantization table must be 8x8")
    coef = block_dct8(image).astype(np.float64)
    h, w = coef.shape
    half = np.tile(tab * (scale / 2.0), (h // 8, w // 8))
    coef += rng.uniform(-1.0, 1.0, size=coef.shape) * half
    return clamp(block_dct8(coef, inverse=True))


# ---------------------------------------------------------------------------
# geometric distortions


def sample_displacements(
    rng: np.random.Generator, shape: tuple[int, int], radius: int, sigma_ratio: float = 0.5
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel integer displacements: per-axis Gaussian with sigma =
    radius * sigma_ratio, rounded, rejected-and-resampled until the sup-norm
    is at most ``radius``."""
    sigma = radius * sigma_ratio
    if sigma == 0.0 or radius == 0:
        z = np.zeros(shape, dtype=np.int64)
        return z, z.copy()

    def draw(n):
        return np.rint(rng.normal(0.0, sigma, size=n)).astype(np.int64)

    dy = draw(shape)
    dx = draw(shape)
    bad = (np.abs(dy) > radius) | (np.abs(dx) > radius)
    while bad.any():
        count = int(bad.sum())
        dy[bad] = draw(count)
        dx[bad] = draw(count)
        bad = (np.abs(dy) > radius) | (np.abs(dx) > radius)
    return dy, dx


def _mirror_indices(idx: np.ndarray, n: int) -> np.ndarray:
    period = 2 * n
    m = np.mod(idx, period)
    return np.where(m >= n, period - 1 - m, m)


def attack_scramble(
    image: np.ndarray,
    radius: int,
    rng: np.random.Generator,
    sigma_ratio: float = 0.5,
) -> np.ndarray:
    """Move each pixel to a nearby random position (mirrored at borders)."""
    if radius < 0:
        raise InvalidSpec("scramble radius must be >= 0")
    img = as_gray(image)
    h, w = img.shape
    dy, dx = sample_displacements(rng, (h, w), radius, sigma_ratio)
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    sy = _mirror_indices(yy + dy, h)
    sx = _mirror_indices(xx + dx, w)
    return img[sy, sx]


def attack_rotate(image: np.ndarray, alpha_deg: float, beta_deg: float) -> np.ndarray:
    """Rotate by alpha, then de-rotate by (-alpha + beta): the small angular
    error beta leaves a residual rotation plus two bicubic resamplings."""
    if not 0.0 < beta_deg < alpha_deg:
        raise InvalidSpec(f"need 0 < beta < alpha, got alpha={alpha_deg} beta={beta_deg}")
    first = rotate_image(image, alpha_deg)
    return clamp(rotate_image(first, -alpha_deg + beta_deg))


def attack_rescale(image: np.ndarray, factor: int) -> np.ndarray:
    """Upscale by an integer factor (Lanczos-3), erase the first row and
    column, then downscale back to the original size (Lanczos-2), forcing a
    non-uniform sub-pixel resampling."""
    if int(factor) != factor or factor < 2:
        raise InvalidSpec(f"rescale factor must be an integer >= 2, got {factor}")
    img = as_gray(image)
    h, w = img.shape
    up = resize_lanczos(img, (factor * h, factor * w), a=3)
    up = up[1:, 1:]
    return clamp(resize_lanczos(up, (h, w), a=2))


# ---------------------------------------------------------------------------
# noise reduction


def attack_spatial_wiener(image: np.ndarray, window: int = 3) -> np.ndarray:
    return clamp(spatial_wiener(image, window))


def attack_wavelet_wiener(
    image: np.ndarray, sigma0: float = DEFAULT_CONFIG.sigma0_attack,
    levels: int = 4, moments: int = 8,
) -> np.ndarray:
    return clamp(wavelet_wiener(image, sigma0, levels, moments).denoised)


# ---------------------------------------------------------------------------
# combined methods


def attack_combo_noise_geom(
    image: np.ndarray,
    rng: np.random.Generator,
    bits: int = 3,
    radius: int = 2,
    alpha_deg: float = 10.0,
    beta_deg: float = 0.5,
    factor: int = 3,
    sigma_ratio: float = 0.5,
) -> np.ndarray:
    """Noise plus geometry, no denoising: lsb -> scramble -> rotate -> rescale."""
    out = attack_lsb(image, bits, rng)
    out = attack_scramble(out, radius, rng, sigma_ratio)
    out = attack_rotate(out, alpha_deg, beta_deg)
    return attack_rescale(out, factor)


def attack_combo_wiener_rotate_deblur(
    image: np.ndarray,
    window: int = 3,
    alpha_deg: float = 10.0,
    beta_deg: float = 0.5,
    psf: PointSpreadFunction | None = None,
    iterations: int = 10,
) -> np.ndarray:
    """Denoise, rotate/de-rotate, then Lucy-Richardson deblur."""
    psf = psf or gaussian_psf(DEFAULT_CONFIG.deblur_psf_size, DEFAULT_CONFIG.deblur_psf_sigma)
    out = attack_spatial_wiener(image, window)
    out = attack_rotate(out, alpha_deg, beta_deg)
    return clamp(lucy_richardson(out, psf, iterations))


def definite_margin(height: int, width: int, beta_deg: float, extra: int = 2) -> int:
    """Border margin hiding the extrapolated band left by the de-rotation
    error: ceil(max(H, W) * tan(beta)) + extra pixels per side."""
    return int(math.ceil(max(height, width) * math.tan(math.radians(beta_deg)))) + extra


def attack_definite(
    image: np.ndarray,
    window: int = 3,
    alpha_deg: float = 10.0,
    beta_deg: float = 0.5,
    psf: PointSpreadFunction | None = None,
    iterations: int = 10,
    margin_extra: int = 2,
) -> np.ndarray:
    """The strongest variant: the wiener+rotate+deblur cascade followed by a
    border crop and a Lanczos-3 re-scale to the original size, which removes
    the tell-tale extrapolation band."""
    out = attack_combo_wiener_rotate_deblur(image, window, alpha_deg, beta_deg, psf, iterations)
    h, w = out.shape
    m = definite_margin(h, w, beta_deg, margin_extra)
    if 2 * m >= min(h, w):
        raise InvalidSpec(f"margin {m} too large for image {h}x{w}")
    crop = out[m: h - m, m: w - m]
    return clamp(resize_lanczos(crop, (h, w), a=3))


# ---------------------------------------------------------------------------
# dispatch


def _require(params: dict, allowed: set[str], kind: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise InvalidSpec(f"unknown parameters {sorted(unknown)} for attack {kind!r}")


def default_params(kind: str, config: ToolkitConfig = DEFAULT_CONFIG) -> dict:
    """Catalog defaults for each attack kind."""
    table = {
        "lsb": {"n": config.lsb_bits},
        "dct_noise": {"scale": config.dct_noise_scale},
        "scramble": {"r": config.scramble_radius},
        "rotate": {"alpha": config.rotate_alpha_deg, "beta": config.rotate_beta_deg},
        "rescale": {"sf": config.rescale_factor},
        "spatial_wiener": {"window": config.spatial_wiener_window},
        "wavelet_wiener": {"sigma0": config.sigma0_attack},
        "combo_noise_geom": {
            "n": config.lsb_bits,
            "r": config.combo_scramble_radius,
            "alpha": config.rotate_alpha_deg,
            "beta": config.rotate_beta_deg,
            "sf": config.rescale_factor,
        },
        "combo_wiener_rotate_deblur": {
            "window": config.spatial_wiener_window,
            "alpha": config.rotate_alpha_deg,
            "beta": config.rotate_beta_deg,
            "iterations": config.deblur_iterations,
        },
        "definite": {
            "window": config.spatial_wiener_window,
            "alpha": config.rotate_alpha_deg,
            "beta": config.rotate_beta_deg,
            "iterations": config.deblur_iterations,
        },
    }
    if kind not in table:
        raise InvalidSpec(f"unknown attack kind {kind!r}")
    return table[kind]


def default_attack_specs(config: ToolkitConfig = DEFAULT_CONFIG, seed: int = 0) -> list[AttackSpec]:
    """One spec per attack kind at catalog defaults."""
    return [AttackSpec(kind, default_params(kind, config), seed) for kind in ATTACK_KINDS]


def apply_attack(image: np.ndarray, spec: AttackSpec, config: ToolkitConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Validate the spec, derive the random stream from its seed, dispatch.

    The input is clamped on entry; the output has the same shape, values in
    [0, 255], and is bit-identical across repeated calls.
    """
    if spec.kind not in ATTACK_KINDS:
        raise InvalidSpec(f"unknown attack kind {spec.kind!r}")
    img = clamp(as_gray(image))
    p = dict(spec.params)
    rng = _rng(spec.seed)
    kind = spec.kind
    psf = gaussian_psf(config.deblur_psf_size, config.deblur_psf_sigma)

    if kind == "lsb":
        _require(p, {"n"}, kind)
        n = int(p.get("n", config.lsb_bits))
        if not 1 <= n <= 7:
            raise InvalidSpec(f"lsb bits must be in 1..7, got {n}")
        return attack_lsb(img, n, rng)
    if kind == "dct_noise":
        _require(p, {"scale"}, kind)
        return attack_dct_noise(img, rng, scale=float(p.get("scale", config.dct_noise_scale)))
    if kind == "scramble":
        _require(p, {"r"}, kind)
        r = int(p.get("r", config.scramble_radius))
        if r < 1:
            raise InvalidSpec(f"scramble radius must be >= 1, got {r}")
        return attack_scramble(img, r, rng, config.scramble_sigma_ratio)
    if kind == "rotate":
        _require(p, {"alpha", "beta"}, kind)
        return attack_rotate(
            img,
            float(p.get("alpha", config.rotate_alpha_deg)),
            float(p.get("beta", config.rotate_beta_deg)),
        )
    if kind == "rescale":
        _require(p, {"sf"}, kind)
        sf = p.get("sf", config.rescale_factor)
        if int(sf) != sf or int(sf) < 2:
            raise InvalidSpec(f"rescale factor must be an integer >= 2, got {sf}")
        return attack_rescale(img, int(sf))
    if kind == "spatial_wiener":
        _require(p, {"window"}, kind)
        return attack_spatial_wiener(img, int(p.get("window", config.spatial_wiener_window)))
    if kind == "wavelet_wiener":
        _require(p, {"sigma0"}, kind)
        return attack_wavelet_wiener(
            img,
            float(p.get("sigma0", config.sigma0_attack)),
            config.wavelet_levels,
            config.wavelet_moments,
        )
    if kind == "combo_noise_geom":
        _require(p, {"n", "r", "alpha", "beta", "sf"}, kind)
        n = int(p.get("n", config.lsb_bits))
        r = int(p.get("r", config.combo_scramble_radius))
        if not 1 <= n <= 7:
            raise InvalidSpec(f"lsb bits must be in 1..7, got {n}")
        if r < 1:
            raise InvalidSpec(f"scramble radius must be >= 1, got {r}")
        return attack_combo_noise_geom(
            img, rng, n, r,
            float(p.get("alpha", config.rotate_alpha_deg)),
            float(p.get("beta", config.rotate_beta_deg)),
            int(p.get("sf", config.rescale_factor)),
            config.scramble_sigma_ratio,
        )
    if kind == "combo_wiener_rotate_deblur":
        _require(p, {"window", "alpha", "beta", "iterations"}, kind)
        return attack_combo_wiener_rotate_deblur(
            img,
            int(p.get("window", config.spatial_wiener_window)),
            float(p.get("alpha", config.rotate_alpha_deg)),
            float(p.get("beta", config.rotate_beta_deg)),
            psf,
            int(p.get("iterations", config.deblur_iterations)),
        )
    # definite
    _require(p, {"window", "alpha", "beta", "iterations"}, kind)
    return attack_definite(
        img,
        int(p.get("window", config.spatial_wiener_window)),
        float(p.get("alpha", config.rotate_alpha_deg)),
        float(p.get("beta", config.rotate_beta_deg)),
        psf,
        int(p.get("iterations", config.deblur_iterations)),
        config.definite_margin_extra,
    )
