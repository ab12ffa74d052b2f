"""Baseline JFIF bitstream assembly.

Emits the fixed marker sequence SOI, APP0, DQT, SOF0, DHT, SOS, scan, EOI
with 4:4:4 or 4:2:0 interleaving. The scan writer is also the rate
accountant: it reports exact entropy-coded bits separately from all
structural bits (markers, tables, stuffing, padding).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bitstream import BitWriter
from .color import rgb_to_ycc
from .dct import fdct_plane
from .entropy import (
    STD_AC_CHROMA,
    STD_AC_LUMA,
    STD_DC_CHROMA,
    STD_DC_LUMA,
    ac_run_lengths,
    build_huffman_table,
)
from .model import (
    ANNEX_K_CHROMA,
    ANNEX_K_LUMA,
    HuffmanSpec,
    QuantTable,
    RgbImage,
    magnitude_code,
    quality_scaled_table,
    size_category,
)
from .quantize import hard_quantize

MARKER_SOI = 0xFFD8
MARKER_EOI = 0xFFD9
MARKER_APP0 = 0xFFE0
MARKER_DQT = 0xFFDB
MARKER_SOF0 = 0xFFC0
MARKER_DHT = 0xFFC4
MARKER_SOS = 0xFFDA


@dataclass(frozen=True)
class RateReport:
    """Exact bit accounting for one emitted file.

    ``entropy_bits`` is the sum of Huffman code lengths plus amplitude bits;
    ``header_bits`` is everything else (markers, tables, byte stuffing and
    final padding), so the two always add up to the file size in bits.
    """

    total_bits: int
    header_bits: int
    entropy_bits: int
    width: int
    height: int
    ideal_bits: float | None = None

    @property
    def bpp(self) -> float:
        return self.total_bits / (self.width * self.height)


@dataclass(frozen=True)
class PlaneCode:
    """One plane's coding decisions: hard DC indices plus AC run-lengths."""

    dc_indices: np.ndarray                       # (B,) int64
    ac: list                                     # B tuples of (r, s, a) triples
    blocks_wide: int
    blocks_high: int

    @classmethod
    def from_indices(cls, indices: np.ndarray, blocks_wide: int,
                     blocks_high: int) -> "PlaneCode":
        return cls(dc_indices=indices[:, 0].astype(np.int64),
                   ac=[ac_run_lengths(row) for row in indices],
                   blocks_wide=blocks_wide, blocks_high=blocks_high)


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">HH", marker, 2 + len(payload)) + payload


def _app0_jfif() -> bytes:
    return _segment(MARKER_APP0, b"JFIF\x00" + bytes([1, 1, 0, 0, 1, 0, 1, 0, 0]))


def _dqt(q_luma: QuantTable, q_chroma: QuantTable) -> bytes:
    payload = bytes([0x00]) + bytes(int(v) for v in q_luma.steps)
    payload += bytes([0x01]) + bytes(int(v) for v in q_chroma.steps)
    return _segment(MARKER_DQT, payload)


def _sof0(width: int, height: int, subsample: str) -> bytes:
    y_sampling = 0x22 if subsample == "420" else 0x11
    payload = struct.pack(">BHHB", 8, height, width, 3)
    payload += bytes([1, y_sampling, 0])
    payload += bytes([2, 0x11, 1])
    payload += bytes([3, 0x11, 1])
    return _segment(MARKER_SOF0, payload)


def _dht(tables: list[tuple[int, int, HuffmanSpec]]) -> bytes:
    payload = b""
    for table_class, dest, spec in tables:
        payload += bytes([table_class << 4 | dest])
        payload += bytes(spec.bits[1:17])
        payload += bytes(spec.huffval)
    return _segment(MARKER_DHT, payload)


def _sos() -> bytes:
    payload = bytes([3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0])
    return _segment(MARKER_SOS, payload)


class _BlockEmitter:
    def __init__(self, writer: BitWriter, dc_spec: HuffmanSpec,
                 ac_spec: HuffmanSpec):
        self.writer = writer
        self.dc_codes = dc_spec.code_table()
        self.ac_codes = ac_spec.code_table()
        self.pred = 0

    def emit(self, dc_index: int, ac_triples) -> None:
        diff = int(dc_index) - self.pred
        self.pred = int(dc_index)
        size = size_category(diff)
        code, length = self.dc_codes[size]
        self.writer.write(code, length)
        self.writer.write(magnitude_code(diff, size), size)
        for r, s, a in ac_triples:
            code, length = self.ac_codes[(r << 4) | s]
            self.writer.write(code, length)
            if s:
                self.writer.write(magnitude_code(a, s), s)


def mcu_order_420(luma_bw: int, luma_bh: int):
    """Scan-order luma block indices for 2x2-sampled MCUs."""
    order = []
    for my in range(luma_bh // 2):
        for mx in range(luma_bw // 2):
            for dy in range(2):
                for dx in range(2):
                    order.append((2 * my + dy) * luma_bw + 2 * mx + dx)
    return order


def encode_jfif(y: PlaneCode, cb: PlaneCode, cr: PlaneCode,
                q_luma: QuantTable, q_chroma: QuantTable,
                dc_luma: HuffmanSpec, ac_luma: HuffmanSpec,
                dc_chroma: HuffmanSpec, ac_chroma: HuffmanSpec,
                width: int, height: int,
                subsample: str = "444") -> tuple[bytes, RateReport]:
    """Assemble a complete baseline JFIF file from per-plane coding choices."""
    if subsample not in ("444", "420"):
        raise ValueError(f"unsupported subsampling mode {subsample!r}")
    if cb.blocks_wide != cr.blocks_wide or cb.blocks_high != cr.blocks_high:
        raise ValueError("chroma planes disagree on geometry")
    if subsample == "444":
        if y.blocks_wide != cb.blocks_wide or y.blocks_high != cb.blocks_high:
            raise ValueError("4:4:4 planes must share one block grid")
    else:
        if y.blocks_wide != 2 * cb.blocks_wide or y.blocks_high != 2 * cb.blocks_high:
            raise ValueError("4:2:0 luma grid must be twice the chroma grid")

    head = bytearray()
    head += struct.pack(">H", MARKER_SOI)
    head += _app0_jfif()
    head += _dqt(q_luma, q_chroma)
    head += _sof0(width, height, subsample)
    head += _dht([(0, 0, dc_luma), (1, 0, ac_luma),
                  (0, 1, dc_chroma), (1, 1, ac_chroma)])
    head += _sos()

    writer = BitWriter()
    y_em = _BlockEmitter(writer, dc_luma, ac_luma)
    cb_em = _BlockEmitter(writer, dc_chroma, ac_chroma)
    cr_em = _BlockEmitter(writer, dc_chroma, ac_chroma)

    if subsample == "444":
        for i in range(y.dc_indices.shape[0]):
            y_em.emit(y.dc_indices[i], y.ac[i])
            cb_em.emit(cb.dc_indices[i], cb.ac[i])
            cr_em.emit(cr.dc_indices[i], cr.ac[i])
    else:
        luma_order = mcu_order_420(y.blocks_wide, y.blocks_high)
        pos = 0
        for c in range(cb.dc_indices.shape[0]):
            for _ in range(4):
                i = luma_order[pos]
                pos += 1
                y_em.emit(y.dc_indices[i], y.ac[i])
            cb_em.emit(cb.dc_indices[c], cb.ac[c])
            cr_em.emit(cr.dc_indices[c], cr.ac[c])

    scan = writer.flush()
    data = bytes(head) + scan + struct.pack(">H", MARKER_EOI)
    total_bits = len(data) * 8
    report = RateReport(total_bits=total_bits,
                        header_bits=total_bits - writer.data_bits,
                        entropy_bits=writer.data_bits,
                        width=width, height=height)
    return data, report


def dc_size_counts(dc_indices: np.ndarray, scan_order=None) -> dict[int, int]:
    """DPCM size-category counts for one component, in scan order."""
    order = range(len(dc_indices)) if scan_order is None else scan_order
    counts: dict[int, int] = {}
    pred = 0
    for i in order:
        size = size_category(int(dc_indices[i]) - pred)
        pred = int(dc_indices[i])
        counts[size] = counts.get(size, 0) + 1
    return counts


def build_dc_huffman(counts: dict[int, int]) -> HuffmanSpec:
    return build_huffman_table({s: c for s, c in counts.items() if c > 0})


def encode_baseline(img: RgbImage, quality: int = 75, subsample: str = "444",
                    optimize_huffman: bool = False) -> tuple[bytes, RateReport]:
    """Plain hard-decision JPEG with quality-scaled reference tables.

    This is the comparison arm: identical transform path, no soft decisions,
    and (by default) the standard Huffman tables.
    """
    q_luma = QuantTable(quality_scaled_table(ANNEX_K_LUMA, quality))
    q_chroma = QuantTable(quality_scaled_table(ANNEX_K_CHROMA, quality))
    planes = rgb_to_ycc(img, subsample)
    codes = {}
    for name, plane, q in (("Y", planes.y, q_luma),
                           ("Cb", planes.cb, q_chroma),
                           ("Cr", planes.cr, q_chroma)):
        dct = fdct_plane(plane, name)
        indices = hard_quantize(dct.blocks, q)
        codes[name] = PlaneCode.from_indices(indices, dct.blocks_wide,
                                             dct.blocks_high)
    if optimize_huffman:
        y_code, cb_code, cr_code = codes["Y"], codes["Cb"], codes["Cr"]
        luma_scan = (mcu_order_420(y_code.blocks_wide, y_code.blocks_high)
                     if subsample == "420" else None)
        ac_weights_y: dict[int, int] = {}
        for ac in y_code.ac:
            for r, s, _ in ac:
                ac_weights_y[(r << 4) | s] = ac_weights_y.get((r << 4) | s, 0) + 1
        ac_weights_c: dict[int, int] = {}
        for code in (cb_code, cr_code):
            for ac in code.ac:
                for r, s, _ in ac:
                    ac_weights_c[(r << 4) | s] = ac_weights_c.get((r << 4) | s, 0) + 1
        dc_luma = build_dc_huffman(dc_size_counts(y_code.dc_indices, luma_scan))
        cb_counts = dc_size_counts(cb_code.dc_indices)
        cr_counts = dc_size_counts(cr_code.dc_indices)
        dc_chroma = build_dc_huffman(
            {s: cb_counts.get(s, 0) + cr_counts.get(s, 0)
             for s in set(cb_counts) | set(cr_counts)})
        tables = (dc_luma, build_huffman_table(ac_weights_y),
                  dc_chroma, build_huffman_table(ac_weights_c))
    else:
        tables = (STD_DC_LUMA, STD_AC_LUMA, STD_DC_CHROMA, STD_AC_CHROMA)
    return encode_jfif(codes["Y"], codes["Cb"], codes["Cr"],
                       q_luma, q_chroma, *tables,
                       width=img.width, height=img.height,
                       subsample=subsample)
