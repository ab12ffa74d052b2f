"""Core data types and exact constants of baseline JPEG.

Everything downstream (transforms, entropy coding, the soft-decision
optimizer) works on the representations defined here: 8x8 blocks stored as
64-vectors in zigzag order, quantization tables as 64 integers in zigzag
order, and run-length coded blocks as (run, size, amplitude) triples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Zigzag scan: ZIGZAG[pos] = raster index (row*8 + col) of zigzag position pos.
ZIGZAG = np.array([
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63], dtype=np.int64)

# RASTER_TO_ZIGZAG[row*8 + col] = zigzag position.
RASTER_TO_ZIGZAG = np.argsort(ZIGZAG)

# ITU-T T.81 Annex K reference quantization tables, zigzag order.
ANNEX_K_LUMA = np.array([
    16, 11, 12, 14, 12, 10, 16, 14, 13, 14, 18, 17, 16, 19, 24, 40,
    26, 24, 22, 22, 24, 49, 35, 37, 29, 40, 58, 51, 61, 60, 57, 51,
    56, 55, 64, 72, 92, 78, 64, 68, 87, 69, 55, 56, 80, 109, 81, 87,
    95, 98, 103, 104, 103, 62, 77, 113, 121, 112, 100, 120, 92, 101,
    103, 99], dtype=np.int64)

ANNEX_K_CHROMA = np.array([
    17, 18, 18, 24, 21, 24, 47, 26, 26, 47, 99, 66, 56, 66, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99],
    dtype=np.int64)

MAX_AC_SIZE = 10   # AC amplitudes fit size categories 1..10
MAX_DC_SIZE = 11   # DC differentials fit size categories 0..11


class HmojpegError(Exception):
    """Base class for all errors raised by this package."""


def zigzag_index(row: int, col: int) -> int:
    """Map an (row, col) position of an 8x8 block to its zigzag position."""
    if not (0 <= row <= 7 and 0 <= col <= 7):
        raise ValueError(f"block position out of range: ({row}, {col})")
    return int(RASTER_TO_ZIGZAG[row * 8 + col])


def zigzag_rowcol(pos: int) -> tuple[int, int]:
    """Inverse of :func:`zigzag_index`."""
    if not (0 <= pos <= 63):
        raise ValueError(f"zigzag position out of range: {pos}")
    r = int(ZIGZAG[pos])
    return r // 8, r % 8


def size_category(amplitude: int) -> int:
    """JPEG size category: smallest s with |amplitude| < 2**s.

    Zero maps to 0 (legal only for DC differentials); nonzero values
    satisfy 2**(s-1) <= |amplitude| < 2**s.
    """
    a = abs(int(amplitude))
    if a >= 2048:
        raise ValueError(f"amplitude {amplitude} exceeds JPEG size categories")
    return a.bit_length()


def magnitude_code(amplitude: int, size: int) -> int:
    """The size-bit JPEG magnitude code for a nonzero (or zero-DC) amplitude.

    Negative values are coded as amplitude + 2**size - 1, i.e. one's
    complement of the positive pattern.
    """
    a = int(amplitude)
    if size == 0:
        return 0
    return a if a >= 0 else a + (1 << size) - 1


def decode_magnitude(code: int, size: int) -> int:
    """Recover the signed amplitude from a JPEG magnitude code."""
    if size == 0:
        return 0
    if code < (1 << (size - 1)):
        return code - (1 << size) + 1
    return code


def quality_scaled_table(base: np.ndarray, quality: int) -> np.ndarray:
    """Scale a reference quantization table by an IJG-style quality factor.

    quality 50 returns the base table; higher values shrink steps, lower
    values grow them. Entries are clamped to [1, 255].
    """
    if not (1 <= quality <= 100):
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    scaled = (base * scale + 50) // 100
    return np.clip(scaled, 1, 255).astype(np.int64)


@dataclass(frozen=True)
class RgbImage:
    """Interleaved 8-bit RGB raster."""

    width: int
    height: int
    samples: np.ndarray  # shape (height, width, 3), uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be at least 1x1")
        if self.samples.shape != (self.height, self.width, 3):
            raise ValueError(
                f"sample array shape {self.samples.shape} does not match "
                f"{self.height}x{self.width}x3")
        if self.samples.dtype != np.uint8:
            raise ValueError("samples must be uint8")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RgbImage":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        h, w = arr.shape[:2]
        return cls(width=w, height=h, samples=arr)


@dataclass(frozen=True)
class YccPlanes:
    """Y/Cb/Cr sample planes, each padded to a multiple of 8.

    Chroma planes may be subsampled relative to luma (4:2:0); the original
    dimensions are kept so the decoder can crop the padding back off.
    """

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    orig_width: int
    orig_height: int

    def __post_init__(self):
        for name, plane in (("y", self.y), ("cb", self.cb), ("cr", self.cr)):
            if plane.shape[0] % 8 or plane.shape[1] % 8:
                raise ValueError(f"{name} plane dimensions {plane.shape} not "
                                 "multiples of 8")


@dataclass(frozen=True)
class DctPlane:
    """All 8x8 DCT blocks of one plane, raster block order, zigzag within."""

    blocks: np.ndarray          # shape (B, 64), float64
    blocks_wide: int
    blocks_high: int
    plane_id: str               # "Y" | "Cb" | "Cr"

    def __post_init__(self):
        if self.blocks.shape != (self.blocks_wide * self.blocks_high, 64):
            raise ValueError("block array does not match plane geometry")
        if self.plane_id not in ("Y", "Cb", "Cr"):
            raise ValueError(f"unknown plane id {self.plane_id!r}")

    @property
    def block_count(self) -> int:
        return self.blocks.shape[0]


@dataclass(frozen=True)
class QuantTable:
    """64 integer quantization steps in zigzag order, each in [1, 255]."""

    steps: np.ndarray

    def __post_init__(self):
        steps = np.asarray(self.steps)
        if steps.shape != (64,):
            raise ValueError("quantization table must have 64 entries")
        if steps.min() < 1 or steps.max() > 255:
            raise ValueError("quantization steps must lie in [1, 255]")
        object.__setattr__(self, "steps", steps.astype(np.int64))


@dataclass(frozen=True)
class RunLengthSequence:
    """Run-length coded form of one block.

    ``dc_size``/``dc_diff`` hold the DPCM-coded DC differential. ``ac``
    holds (run, size, amplitude) triples in scan order, where (15, 0, 0)
    is ZRL and (0, 0, 0) is EOB. EOB is present unless zigzag position 63
    carries a coded coefficient.
    """

    dc_size: int
    dc_diff: int
    ac: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if size_category(self.dc_diff) != self.dc_size or self.dc_size > MAX_DC_SIZE:
            raise ValueError("DC differential does not match its size category")
        for r, s, a in self.ac:
            if (r, s) == (0, 0) or (r, s) == (15, 0):
                if a != 0:
                    raise ValueError("EOB/ZRL carry no amplitude")
                continue
            if not (0 <= r <= 15):
                raise ValueError(f"zero run {r} out of range")
            if not (1 <= s <= MAX_AC_SIZE):
                raise ValueError(f"AC size category {s} out of range")
            if a == 0 or size_category(a) != s:
                raise ValueError(f"amplitude {a} does not match size {s}")


# (run, size) symbol ids: r*10 + (s-1) for s in 1..10, then EOB, ZRL.
N_RS_SYMBOLS = 162
EOB_SYMBOL = 160
ZRL_SYMBOL = 161


def rs_symbol(run: int, size: int) -> int:
    """Symbol id of an AC (run, size) pair, EOB, or ZRL."""
    if (run, size) == (0, 0):
        return EOB_SYMBOL
    if (run, size) == (15, 0):
        return ZRL_SYMBOL
    if not (0 <= run <= 15 and 1 <= size <= MAX_AC_SIZE):
        raise ValueError(f"illegal (run, size) pair ({run}, {size})")
    return run * MAX_AC_SIZE + (size - 1)


def rs_pair(symbol: int) -> tuple[int, int]:
    """Inverse of :func:`rs_symbol`."""
    if symbol == EOB_SYMBOL:
        return (0, 0)
    if symbol == ZRL_SYMBOL:
        return (15, 0)
    if not (0 <= symbol < 160):
        raise ValueError(f"unknown symbol id {symbol}")
    return symbol // MAX_AC_SIZE, symbol % MAX_AC_SIZE + 1


@dataclass(frozen=True)
class RlsDistribution:
    """Probability mass over (run, size) symbols plus EOB and ZRL.

    ``counts`` holds the raw symbol counts the mass was estimated from;
    ``probs`` is the (possibly smoothed) normalized distribution.
    """

    counts: np.ndarray   # int64, length N_RS_SYMBOLS
    probs: np.ndarray    # float64, length N_RS_SYMBOLS

    def __post_init__(self):
        if self.counts.shape != (N_RS_SYMBOLS,) or self.probs.shape != (N_RS_SYMBOLS,):
            raise ValueError("distribution arrays must cover the full symbol alphabet")
        if abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ValueError("symbol probabilities must sum to 1")
        if np.any((self.counts > 0) & (self.probs <= 0.0)):
            raise ValueError("observed symbols must carry nonzero mass")

    def code_bits(self) -> np.ndarray:
        """Idealized code length -log2 p per symbol (inf where p == 0)."""
        with np.errstate(divide="ignore"):
            return -np.log2(self.probs)


@dataclass(frozen=True)
class HuffmanSpec:
    """A JPEG DHT table: code-length histogram BITS plus symbol order HUFFVAL.

    ``bits[k]`` counts codes of length k for k in 1..16 (index 0 unused).
    """

    bits: tuple[int, ...]
    huffval: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 17 or self.bits[0] != 0:
            raise ValueError("BITS must have 17 entries with index 0 unused")
        if sum(self.bits) != len(self.huffval):
            raise ValueError("BITS total does not match HUFFVAL length")
        if len(self.huffval) > 256:
            raise ValueError("a Huffman table carries at most 256 symbols")
        kraft = sum(n * 2.0 ** -length for length, n in enumerate(self.bits) if length)
        if kraft > 1.0 + 1e-12:
            raise ValueError("code lengths violate the Kraft inequality")
        if any((length == 16 and code == 0xFFFF)
               for code, length in self.code_table().values()):
            raise ValueError("the all-ones code of length 16 is reserved")

    def code_table(self) -> dict[int, tuple[int, int]]:
        """symbol -> (code, length), canonical JPEG code assignment."""
        table = {}
        code = 0
        k = 0
        for length in range(1, 17):
            for _ in range(self.bits[length]):
                table[self.huffval[k]] = (code, length)
                code += 1
                k += 1
            code <<= 1
        return table

    def code_lengths(self) -> dict[int, int]:
        return {sym: length for sym, (_, length) in self.code_table().items()}
