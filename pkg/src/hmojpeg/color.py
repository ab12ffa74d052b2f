"""Color conversion, edge padding, and 8x8 block (de)composition."""

from __future__ import annotations

import numpy as np

from .model import RASTER_TO_ZIGZAG, ZIGZAG, RgbImage, YccPlanes

# ITU-R BT.601 full-range forward matrix.
_FWD = np.array([
    [0.299, 0.587, 0.114],
    [-0.168735892, -0.331264108, 0.5],
    [0.5, -0.418687589, -0.081312411]])
_FWD_OFFSET = np.array([0.0, 128.0, 128.0])


def rgb_to_ycc(img: RgbImage, subsample: str = "444") -> YccPlanes:
    """Convert to full-range YCbCr and pad every plane to multiples of 8.

    Padding replicates the edge samples. With ``subsample="420"`` the luma
    plane is padded to multiples of 16 and chroma is averaged 2x2.
    """
    if subsample not in ("444", "420"):
        raise ValueError(f"unsupported subsampling mode {subsample!r}")
    rgb = img.samples.astype(np.float64)
    ycc = rgb @ _FWD.T + _FWD_OFFSET
    ycc = np.clip(ycc, 0.0, 255.0)

    mult = 16 if subsample == "420" else 8
    padded = _pad_edge(ycc, mult)
    y = padded[:, :, 0]
    cb = padded[:, :, 1]
    cr = padded[:, :, 2]
    if subsample == "420":
        cb = _mean_2x2(cb)
        cr = _mean_2x2(cr)
    return YccPlanes(y=y, cb=cb, cr=cr,
                     orig_width=img.width, orig_height=img.height)


def ycc_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray,
               width: int, height: int) -> RgbImage:
    """Inverse conversion; chroma planes are replicated up if subsampled."""
    if cb.shape != y.shape:
        cb = _replicate_2x2(cb)[:y.shape[0], :y.shape[1]]
        cr = _replicate_2x2(cr)[:y.shape[0], :y.shape[1]]
    y = y[:height, :width]
    cb = cb[:height, :width] - 128.0
    cr = cr[:height, :width] - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136286 * cb - 0.714136286 * cr
    b = y + 1.772 * cb
    rgb = np.stack([r, g, b], axis=-1)
    rgb = np.clip(np.floor(rgb + 0.5), 0.0, 255.0).astype(np.uint8)
    return RgbImage(width=width, height=height, samples=rgb)


def _pad_edge(arr: np.ndarray, mult: int) -> np.ndarray:
    h, w = arr.shape[:2]
    ph = (-h) % mult
    pw = (-w) % mult
    if ph == 0 and pw == 0:
        return arr
    pad = [(0, ph), (0, pw)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, pad, mode="edge")


def _mean_2x2(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def _replicate_2x2(plane: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)


def plane_to_blocks(plane: np.ndarray) -> np.ndarray:
    """Split a padded plane into raster-ordered 8x8 blocks, zigzag within.

    Returns shape (B, 64) where entry order follows the zigzag scan.
    """
    h, w = plane.shape
    tiles = plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3)
    flat = tiles.reshape(-1, 64)
    return flat[:, ZIGZAG]


def blocks_to_plane(blocks: np.ndarray, blocks_wide: int) -> np.ndarray:
    """Inverse of :func:`plane_to_blocks`."""
    flat = blocks[:, RASTER_TO_ZIGZAG]
    bh = blocks.shape[0] // blocks_wide
    tiles = flat.reshape(bh, blocks_wide, 8, 8).transpose(0, 2, 1, 3)
    return tiles.reshape(bh * 8, blocks_wide * 8)
