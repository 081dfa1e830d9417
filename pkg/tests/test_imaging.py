import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prnulab.errors import DimensionMismatch, ImageTooSmall, TooFewImages
from prnulab.imaging import (
    CameraDataset,
    center_crop,
    discover_dataset,
    load_image,
    preprocess,
    save_png,
    snr_db,
    to_luminance,
)


def color(h, w, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=(h, w, 3), dtype=np.uint8)


# ---------------------------------------------------------------------------
# preprocess


def test_preprocess_centered_crop_landscape():
    raw = color(48, 64)
    out = preprocess(raw, 32)
    assert out.shape == (32, 32)
    expected = to_luminance(raw[8:40, 16:48])
    assert np.allclose(out, expected)


def test_preprocess_portrait_matches_quarter_turned_twin():
    land = color(48, 64, seed=3)
    portrait = np.rot90(land, k=1, axes=(0, 1))  # counter-clockwise twin
    assert np.array_equal(preprocess(portrait, 32), preprocess(land, 32))


def test_preprocess_uniform_gray_is_exact():
    raw = np.full((40, 60, 3), 100, dtype=np.uint8)
    out = preprocess(raw, 16)
    assert out.dtype == np.float32
    assert np.all(out == np.float32(100.0))


def test_preprocess_too_small():
    with pytest.raises(ImageTooSmall):
        preprocess(color(30, 64), 32)


def test_preprocess_idempotent_on_conforming_input():
    gray = np.random.default_rng(1).uniform(0, 255, (32, 32)).astype(np.float32)
    once = preprocess(gray, 32)
    assert np.array_equal(once, preprocess(once, 32))


def test_center_crop_arithmetic():
    img = np.arange(7 * 9).reshape(7, 9)
    out = center_crop(img, 5)
    assert np.array_equal(out, img[1:6, 2:7])


# ---------------------------------------------------------------------------
# snr


def test_snr_identical_is_infinite():
    x = np.random.default_rng(2).uniform(0, 255, (16, 16)).astype(np.float32)
    assert snr_db(x, x) == float("inf")


def test_snr_constant_pair_is_40db():
    a = np.full((10, 10), 100.0, dtype=np.float32)
    b = np.full((10, 10), 99.0, dtype=np.float32)
    assert np.isclose(snr_db(a, b), 40.0, rtol=1e-12)


def test_snr_matches_direct_sum_oracle():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 255, (12, 12)).astype(np.float32)
    b = np.roll(a, 1, axis=1)
    num = den = 0.0
    for i in range(12):
        for j in range(12):
            num += float(a[i, j]) ** 2
            den += (float(a[i, j]) - float(b[i, j])) ** 2
    assert np.isclose(snr_db(a, b), 10.0 * np.log10(num / den), rtol=1e-9)


def test_snr_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        snr_db(np.zeros((4, 4)), np.zeros((4, 5)))


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_snr_invariant_under_joint_permutation(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(1, 255, (8, 8))
    b = rng.uniform(1, 255, (8, 8))
    perm = rng.permutation(64)
    ap = a.ravel()[perm].reshape(8, 8)
    bp = b.ravel()[perm].reshape(8, 8)
    assert np.isclose(snr_db(a, b), snr_db(ap, bp), rtol=1e-12)


def test_snr_decreases_with_noise_variance():
    # statistical: growing zero-mean noise lowers SNR in >= 95% of trials
    rng = np.random.default_rng(4)
    base = rng.uniform(50, 200, (32, 32))
    wins = trials = 0
    for _ in range(20):
        prev = None
        for sigma in (1.0, 2.0, 4.0, 8.0):
            noisy = base + rng.normal(0, sigma, base.shape)
            value = snr_db(base, noisy)
            if prev is not None:
                trials += 1
                wins += int(value < prev)
            prev = value
    assert wins / trials >= 0.95


# ---------------------------------------------------------------------------
# dataset discovery


def make_dataset_dir(tmp_path, layout):
    for cam, count in layout.items():
        d = tmp_path / cam
        d.mkdir()
        for i in range(count):
            save_png(np.full((8, 8), 100.0 + i), d / f"im{i:02d}.png")
    return tmp_path


def test_discover_dataset_sorted(tmp_path):
    make_dataset_dir(tmp_path, {"zcam": 4, "acam": 5})
    ds = discover_dataset(tmp_path)
    assert ds.camera_ids == ["acam", "zcam"]
    names = [p.name for p in ds.cameras[0][1]]
    assert names == sorted(names)
    assert isinstance(ds, CameraDataset)


def test_discover_dataset_rejects_small_camera(tmp_path):
    make_dataset_dir(tmp_path, {"cam": 3})
    with pytest.raises(TooFewImages):
        discover_dataset(tmp_path)


def test_discover_dataset_empty(tmp_path):
    with pytest.raises(TooFewImages):
        discover_dataset(tmp_path)


def test_png_round_trip(tmp_path):
    img = np.random.default_rng(5).uniform(0, 255, (16, 16)).astype(np.float32)
    path = tmp_path / "x.png"
    save_png(img, path)
    back = load_image(path)
    assert back.shape == (16, 16)
    assert np.abs(back.astype(np.float32) - np.rint(img)).max() == 0.0
