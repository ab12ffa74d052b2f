"""Frequency sensitivity tables and cross-resolution mapping.

A sensitivity table holds, per color channel, one mean squared-gradient value
for each of the 64 block-transform frequencies, measured at some image short
side. When an image is compressed at a larger short side than the table was
measured at, the table is mapped through the linear chain

    coefficient basis -> spatial block -> zero-pad -> bilinear downscale
    -> forward transform

whose 64x64 Jacobian redistributes squared gradients across frequencies.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .dct import fdct_block, idct_block
from .model import HmojpegError

FORMAT_TAG = "hmojpeg-sensitivity/1"
CHANNEL_NAMES = ("Y", "Cb", "Cr")


class SensitivityFormatError(HmojpegError):
    """The interchange file is missing or malformed."""


@dataclass(frozen=True)
class SensitivityTable:
    """Per-channel mean squared gradients, indexed in zigzag order."""

    channels: dict[str, np.ndarray]       # name -> (64,) float64
    resolution: int                       # short side the values apply to
    model: str = ""
    n_samples: int = 0

    def __post_init__(self):
        if set(self.channels) != set(CHANNEL_NAMES):
            raise ValueError(
                f"expected channels {CHANNEL_NAMES}, got {sorted(self.channels)}")
        fixed = {}
        for name in CHANNEL_NAMES:
            values = np.asarray(self.channels[name], dtype=np.float64)
            if values.shape != (64,):
                raise ValueError(
                    f"channel {name} must hold 64 values, got {values.shape}")
            if not np.all(np.isfinite(values)) or np.any(values < 0):
                raise ValueError(f"channel {name} values must be finite and >= 0")
            fixed[name] = values
        object.__setattr__(self, "channels", fixed)
        if self.resolution < 8:
            raise ValueError(f"resolution must be >= 8, got {self.resolution}")

    def channel(self, name: str) -> np.ndarray:
        return self.channels[name]


def uniform_table(resolution: int, value: float = 0.0) -> SensitivityTable:
    """A flat table; with value 0 every weight degenerates to 1."""
    channels = {n: np.full(64, float(value)) for n in CHANNEL_NAMES}
    return SensitivityTable(channels=channels, resolution=resolution,
                            model="uniform", n_samples=0)


def save_sensitivity(table: SensitivityTable, path: str) -> None:
    payload = {
        "format": FORMAT_TAG,
        "model": table.model,
        "n_samples": table.n_samples,
        "resolution": table.resolution,
        "channels": {n: [float(v) for v in table.channels[n]]
                     for n in CHANNEL_NAMES},
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def load_sensitivity(path: str) -> SensitivityTable:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise SensitivityFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SensitivityFormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SensitivityFormatError(f"{path}: top level must be an object")
    tag = payload.get("format")
    if tag != FORMAT_TAG:
        raise SensitivityFormatError(
            f"{path}: format tag {tag!r} is not {FORMAT_TAG!r}")
    for key in ("resolution", "channels"):
        if key not in payload:
            raise SensitivityFormatError(f"{path}: missing required key {key!r}")
    channels_raw = payload["channels"]
    if not isinstance(channels_raw, dict):
        raise SensitivityFormatError(f"{path}: 'channels' must be an object")
    channels = {}
    for name in CHANNEL_NAMES:
        if name not in channels_raw:
            raise SensitivityFormatError(f"{path}: missing channel {name!r}")
        values = channels_raw[name]
        if not isinstance(values, list) or len(values) != 64:
            raise SensitivityFormatError(
                f"{path}: channel {name!r} must be a list of 64 numbers")
        channels[name] = np.asarray(values, dtype=np.float64)
    try:
        return SensitivityTable(
            channels=channels,
            resolution=int(payload["resolution"]),
            model=str(payload.get("model", "")),
            n_samples=int(payload.get("n_samples", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise SensitivityFormatError(f"{path}: {exc}") from exc


def _resize_matrix(n_out: int, n_in: int) -> np.ndarray:
    """1-D bilinear interpolation matrix, half-pixel-centres convention."""
    matrix = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for i in range(n_out):
        src = (i + 0.5) * scale - 0.5
        if src <= 0.0:
            matrix[i, 0] = 1.0
            continue
        if src >= n_in - 1:
            matrix[i, n_in - 1] = 1.0
            continue
        j = int(math.floor(src))
        t = src - j
        matrix[i, j] = 1.0 - t
        matrix[i, j + 1] = t
    return matrix


def padded_block_side(m: int, n: int) -> int:
    """Side length at short side m covering one 8x8 block at short side n."""
    return int(round(8 * m / n))


@dataclass(frozen=True)
class AsmJacobian:
    """Linear map between block coefficients at two image short sides."""

    matrix: np.ndarray                    # (64, 64): row i = chain(basis i)
    source_side: int                      # m, the compression short side
    target_side: int                      # n, the measurement short side
    padded_side: int                      # K, spatial support of one block
    interpolation: str = "bilinear"


def build_asm_jacobian(source_side: int, target_side: int) -> AsmJacobian:
    """Jacobian of the pad-and-downscale chain between block transforms.

    Each source-frequency basis block is rendered to pixels, embedded in the
    centre of a K x K zero field (K the source-scale footprint of one
    target-scale block), bilinearly resized to 8x8 and transformed back.
    With equal sides K = 8 and the chain is the identity.
    """
    if target_side < 8:
        raise ValueError(f"target side must be >= 8, got {target_side}")
    if source_side < target_side:
        raise ValueError(
            f"source side {source_side} must be >= target side {target_side}")
    k = padded_block_side(source_side, target_side)
    offset = (k - 8) // 2
    resize = _resize_matrix(8, k)
    matrix = np.zeros((64, 64))
    for freq in range(64):
        basis = np.zeros(64)
        basis[freq] = 1.0
        spatial = idct_block(basis)
        padded = np.zeros((k, k))
        padded[offset:offset + 8, offset:offset + 8] = spatial
        small = resize @ padded @ resize.T
        matrix[freq] = fdct_block(small)
    return AsmJacobian(matrix=matrix, source_side=source_side,
                       target_side=target_side, padded_side=k)


def map_sensitivity(table: SensitivityTable,
                    jacobian: AsmJacobian) -> SensitivityTable:
    """Re-express a measured table at the Jacobian's source short side.

    Squared gradients propagate through the squared Jacobian: the mapped
    value for source frequency i is sum_k J[i, k]^2 * S[k], where row i of
    J is the chain applied to source basis vector i (so multiplying a
    measurement-side gradient by J pulls it back to the source side).
    """
    if jacobian.target_side != table.resolution:
        raise ValueError(
            f"jacobian target side {jacobian.target_side} does not match "
            f"the table's measurement side {table.resolution}")
    squared = jacobian.matrix * jacobian.matrix
    channels = {name: squared @ table.channels[name]
                for name in CHANNEL_NAMES}
    return replace(table, channels=channels,
                   resolution=jacobian.source_side)


def map_to_side(table: SensitivityTable, source_side: int) -> SensitivityTable:
    """Convenience wrapper: build the Jacobian for ``source_side`` and map."""
    if source_side == table.resolution:
        return table
    return map_sensitivity(table,
                           build_asm_jacobian(source_side, table.resolution))
