"""Hard (round-to-nearest) quantization of DCT coefficients."""

from __future__ import annotations

import numpy as np

from .model import MAX_AC_SIZE, MAX_DC_SIZE, QuantTable


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (JPEG convention)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def hard_quantize(coeffs: np.ndarray, q: QuantTable) -> np.ndarray:
    """Quantize zigzag coefficients (any leading batch shape) to indices.

    Raises if any resulting index falls outside the JPEG size categories,
    which signals an invalid table/input combination.
    """
    idx = round_half_away(np.asarray(coeffs, dtype=np.float64) / q.steps)
    idx = idx.astype(np.int64)
    flat = idx.reshape(-1, 64)
    if np.abs(flat[:, 0]).max(initial=0) >= (1 << MAX_DC_SIZE):
        raise ValueError("DC index exceeds JPEG size categories")
    if flat.shape[1] > 1 and np.abs(flat[:, 1:]).max(initial=0) >= (1 << MAX_AC_SIZE):
        raise ValueError("AC index exceeds JPEG size categories")
    return idx


def dequantize(indices: np.ndarray, q: QuantTable) -> np.ndarray:
    """Reconstruct coefficients from quantization indices."""
    return indices.astype(np.float64) * q.steps
