"""Orthonormal 8x8 2-D DCT-II and its inverse.

Implemented as two small matrix products with a precomputed basis matrix;
the same basis drives the batched whole-plane transforms used by the
encoder and the sensitivity remapping pipeline.
"""

from __future__ import annotations

import numpy as np

from .color import blocks_to_plane, plane_to_blocks
from .model import RASTER_TO_ZIGZAG, ZIGZAG, DctPlane

LEVEL_SHIFT = 128.0


def _basis() -> np.ndarray:
    k = np.arange(8)
    t = np.cos((2 * k[None, :] + 1) * k[:, None] * np.pi / 16.0) / 2.0
    t[0, :] = 1.0 / np.sqrt(8.0)
    return t


DCT_BASIS = _basis()           # rows are the 1-D basis vectors


def fdct_block(spatial: np.ndarray) -> np.ndarray:
    """Forward DCT of one 8x8 spatial block; coefficients in zigzag order."""
    block = np.asarray(spatial, dtype=np.float64).reshape(8, 8)
    coeff = DCT_BASIS @ block @ DCT_BASIS.T
    return coeff.reshape(64)[ZIGZAG]


def idct_block(coeff: np.ndarray) -> np.ndarray:
    """Inverse DCT of 64 zigzag-ordered coefficients; returns an 8x8 block."""
    grid = np.asarray(coeff, dtype=np.float64)[RASTER_TO_ZIGZAG].reshape(8, 8)
    return DCT_BASIS.T @ grid @ DCT_BASIS


def fdct_plane(plane: np.ndarray, plane_id: str) -> DctPlane:
    """Level-shift a padded sample plane and transform every 8x8 block."""
    blocks = plane_to_blocks(plane - LEVEL_SHIFT)
    grids = blocks[:, RASTER_TO_ZIGZAG].reshape(-1, 8, 8)
    coeffs = np.einsum("ij,bjk,lk->bil", DCT_BASIS, grids, DCT_BASIS,
                       optimize=True)
    zz = coeffs.reshape(-1, 64)[:, ZIGZAG]
    return DctPlane(blocks=zz, blocks_wide=plane.shape[1] // 8,
                    blocks_high=plane.shape[0] // 8, plane_id=plane_id)


def idct_plane(blocks: np.ndarray, blocks_wide: int) -> np.ndarray:
    """Inverse of :func:`fdct_plane`, returning unshifted samples."""
    grids = blocks[:, RASTER_TO_ZIGZAG].reshape(-1, 8, 8)
    spatial = np.einsum("ji,bjk,kl->bil", DCT_BASIS, grids, DCT_BASIS,
                        optimize=True)
    flat = spatial.reshape(-1, 64)[:, ZIGZAG]
    return blocks_to_plane(flat, blocks_wide) + LEVEL_SHIFT
