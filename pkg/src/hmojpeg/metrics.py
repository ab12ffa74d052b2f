"""Pixel-domain quality and rate metrics."""

from __future__ import annotations

import numpy as np

PSNR_CAP_DB = 99.0


def mse(reference: np.ndarray, test: np.ndarray) -> float:
    """Mean squared error over all samples, computed in float64."""
    if reference.shape != test.shape:
        raise ValueError(
            f"shape mismatch {reference.shape} vs {test.shape}")
    diff = reference.astype(np.float64) - test.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(reference: np.ndarray, test: np.ndarray, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB, capped at 99 dB for identical inputs."""
    err = mse(reference, test)
    if err == 0.0:
        return PSNR_CAP_DB
    value = 10.0 * np.log10(peak * peak / err)
    return float(min(value, PSNR_CAP_DB))


def bits_per_pixel(n_bits: int, width: int, height: int) -> float:
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    return n_bits / (width * height)
