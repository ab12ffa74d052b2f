"""Sensitivity-weighted frequency-domain distortion.

The measure is a per-frequency weighted squared error on block-transform
coefficients. Each weight is 1 + lambda * S_i, so lambda = 0 recovers plain
squared error while large lambda tilts the error toward frequencies the
downstream model responds to. Weights are built once per (table, lambda)
pair and shared by every block of a channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import QuantTable
from .sensitivity import CHANNEL_NAMES, SensitivityTable


@dataclass(frozen=True)
class HmoeWeights:
    """Per-frequency distortion weights for all three channels."""

    channels: dict[str, np.ndarray]       # name -> (64,) float64, all >= 1
    lam: float

    def __post_init__(self):
        if set(self.channels) != set(CHANNEL_NAMES):
            raise ValueError(
                f"expected channels {CHANNEL_NAMES}, got {sorted(self.channels)}")
        fixed = {}
        for name in CHANNEL_NAMES:
            values = np.asarray(self.channels[name], dtype=np.float64)
            if values.shape != (64,):
                raise ValueError(
                    f"channel {name}: expected 64 weights, got {values.shape}")
            if not np.all(np.isfinite(values)) or np.any(values < 1.0):
                raise ValueError(
                    f"channel {name}: weights must be finite and >= 1")
            fixed[name] = values
        object.__setattr__(self, "channels", fixed)

    def channel(self, name: str) -> np.ndarray:
        return self.channels[name]


def build_weights(sensitivity: SensitivityTable | None,
                  lam: float) -> HmoeWeights:
    """Weights 1 + lambda * S_i; a missing table or lambda = 0 gives ones."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if sensitivity is None or lam == 0.0:
        channels = {name: np.ones(64) for name in CHANNEL_NAMES}
    else:
        channels = {name: 1.0 + lam * sensitivity.channel(name)
                    for name in CHANNEL_NAMES}
    return HmoeWeights(channels=channels, lam=float(lam))


def hmoe_block(x: np.ndarray, indices: np.ndarray, q: QuantTable,
               weights: HmoeWeights, channel: str = "Y") -> float:
    """Weighted squared error of one block's reconstruction.

    Computes sum_i w_i * (x_i - I_i * q_i)^2 over all 64 frequencies; zero
    exactly when the reconstruction is exact. Also accepts batches of blocks
    (leading dimensions are summed over).
    """
    x = np.asarray(x, dtype=np.float64)
    indices = np.asarray(indices, dtype=np.float64)
    if x.shape != indices.shape or x.shape[-1] != 64:
        raise ValueError(f"incompatible shapes {x.shape} vs {indices.shape}")
    diff = x - indices * q.steps.astype(np.float64)
    return float(np.sum(diff * diff * weights.channel(channel)))
