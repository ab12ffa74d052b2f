"""Deterministic synthetic test corpus.

Thirty small natural-looking images (smooth shading, a few hard edges, mild
texture) across a handful of sizes, generated from fixed seeds so every run
sees identical pixels. Also provides a synthetic per-frequency sensitivity
fixture whose measurement side equals the smallest corpus short side, so the
resolution-mapping path is exercised on the larger images.
"""

from __future__ import annotations

import numpy as np

from hmojpeg import RgbImage, SensitivityTable

# (height, width) cycle; all short sides >= 88.
_SIZES = ((96, 96), (88, 104), (112, 96), (96, 120), (104, 88), (96, 96))

_BLUR = np.array([1.0, 4.0, 6.0, 4.0, 1.0])
_BLUR = _BLUR / _BLUR.sum()

SENSITIVITY_SIDE = 88


def _blur_axis(img: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(img)
    for offset, weight in zip(range(-2, 3), _BLUR):
        out += weight * np.roll(img, offset, axis=axis)
    return out


def _smooth(img: np.ndarray, passes: int = 1) -> np.ndarray:
    for _ in range(passes):
        img = _blur_axis(_blur_axis(img, 0), 1)
    return img


def _coarse_field(rng: np.random.Generator, h: int, w: int,
                  cell: int) -> np.ndarray:
    gh, gw = h // cell + 2, w // cell + 2
    grid = rng.normal(0.0, 1.0, size=(gh, gw, 3))
    up = np.repeat(np.repeat(grid, cell, axis=0), cell, axis=1)
    return _smooth(up[:h, :w], passes=2)


def make_image(seed: int) -> RgbImage:
    rng = np.random.default_rng(seed)
    h, w = _SIZES[seed % len(_SIZES)]

    img = 128.0 + 55.0 * _coarse_field(rng, h, w, 24)
    img += 25.0 * _coarse_field(rng, h, w, 8)

    # A few hard-edged patches with their own color cast.
    for _ in range(int(rng.integers(2, 5))):
        y0 = int(rng.integers(0, h - 8))
        x0 = int(rng.integers(0, w - 8))
        y1 = y0 + int(rng.integers(8, h // 2))
        x1 = x0 + int(rng.integers(8, w // 2))
        cast = rng.normal(0.0, 45.0, size=3)
        img[y0:y1, x0:x1] += cast

    # A diagonal luminance ramp and mild texture.
    yy, xx = np.mgrid[0:h, 0:w]
    angle = rng.uniform(0, 2 * np.pi)
    ramp = (np.cos(angle) * xx + np.sin(angle) * yy) / max(h, w)
    img += 30.0 * ramp[:, :, None]
    img += _smooth(rng.normal(0.0, 6.0, size=(h, w, 3)))

    samples = np.clip(img, 0, 255).astype(np.uint8)
    return RgbImage(width=w, height=h, samples=samples)


def make_corpus(n: int = 30) -> list[RgbImage]:
    return [make_image(1000 + i) for i in range(n)]


def make_sensitivity() -> SensitivityTable:
    """Low-frequency-heavy table at gradient scale for 0..255 samples.

    Values around 1e-11 are typical for squared loss gradients taken with
    respect to coefficients of level-shifted 8-bit samples, which is what
    makes weighting strengths near 1e12 meaningful.
    """
    rng = np.random.default_rng(424242)
    channels = {}
    for name, scale in (("Y", 2.0e-11), ("Cb", 6.0e-12), ("Cr", 6.0e-12)):
        profile = np.exp(-np.arange(64) / 9.0)
        jitter = 1.0 + 0.25 * rng.random(64)
        channels[name] = scale * profile * jitter
    return SensitivityTable(channels=channels, resolution=SENSITIVITY_SIDE,
                            model="synthetic-fixture", n_samples=100)
