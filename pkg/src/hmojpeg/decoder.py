"""Strict baseline JFIF decoder used for verification and metrics.

Parses exactly the marker sequence this library emits (single non-progressive
scan, three components, no restart intervals), recovers the quantized
coefficient blocks bit-exactly, and reconstructs pixels through the inverse
transform chain. Structural problems raise :class:`FormatError`; corrupt
entropy data raises the bitstream-layer errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstream import BitReader
from .color import ycc_to_rgb
from .dct import idct_plane
from .model import HmojpegError, HuffmanSpec, QuantTable, decode_magnitude
from .quantize import dequantize


class FormatError(HmojpegError):
    """The byte stream is not a baseline file this library can parse."""


@dataclass(frozen=True)
class DecodedImage:
    """Everything recovered from one file: pixels plus coding-layer state."""

    samples: np.ndarray                   # (height, width, 3) uint8 RGB
    width: int
    height: int
    subsample: str
    quant_tables: dict[int, QuantTable]
    indices: dict[str, np.ndarray]        # plane -> (B, 64) int64, zigzag
    blocks_wide: dict[str, int]
    blocks_high: dict[str, int]


class _HuffmanDecoder:
    """Canonical code walker built from BITS/HUFFVAL."""

    def __init__(self, spec: HuffmanSpec):
        self.mincode = [0] * 17
        self.maxcode = [-1] * 17
        self.valptr = [0] * 17
        self.huffval = spec.huffval
        code = 0
        k = 0
        for length in range(1, 17):
            if spec.bits[length]:
                self.valptr[length] = k
                self.mincode[length] = code
                code += spec.bits[length]
                k += spec.bits[length]
                self.maxcode[length] = code - 1
            code <<= 1

    def decode(self, reader: BitReader) -> int:
        code = reader.read_bit()
        length = 1
        while code > self.maxcode[length]:
            if length == 16:
                raise FormatError("entropy stream contains an invalid code")
            code = (code << 1) | reader.read_bit()
            length += 1
        return self.huffval[self.valptr[length] + code - self.mincode[length]]


def _receive_extend(reader: BitReader, size: int) -> int:
    if size == 0:
        return 0
    return decode_magnitude(reader.read_bits(size), size)


class _ByteParser:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def u8(self) -> int:
        if self.pos >= len(self.data):
            raise FormatError("unexpected end of file in marker segment")
        v = self.data[self.pos]
        self.pos += 1
        return v

    def u16(self) -> int:
        return (self.u8() << 8) | self.u8()

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("unexpected end of file in marker segment")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk


def _decode_block(reader: BitReader, dc: _HuffmanDecoder, ac: _HuffmanDecoder,
                  pred: int) -> tuple[np.ndarray, int]:
    block = np.zeros(64, dtype=np.int64)
    size = dc.decode(reader)
    pred += _receive_extend(reader, size)
    block[0] = pred
    pos = 1
    while pos < 64:
        symbol = ac.decode(reader)
        run, size = symbol >> 4, symbol & 0x0F
        if size == 0:
            if run == 0:
                break
            if run != 15:
                raise FormatError(f"invalid zero-size AC symbol {symbol:#04x}")
            pos += 16
        else:
            pos += run
            if pos > 63:
                raise FormatError("run-length overruns the block")
            block[pos] = _receive_extend(reader, size)
            pos += 1
    return block, pred


def decode_jfif(data: bytes) -> DecodedImage:
    """Decode one baseline 3-component file emitted by this library."""
    parser = _ByteParser(data)
    if parser.u16() != 0xFFD8:
        raise FormatError("missing start-of-image marker")

    quant: dict[int, QuantTable] = {}
    huffman: dict[tuple[int, int], _HuffmanDecoder] = {}
    frame = None
    scan_params = None

    while True:
        marker = parser.u16()
        if marker == 0xFFD9:
            raise FormatError("end-of-image before any scan data")
        if marker >> 8 != 0xFF:
            raise FormatError(f"expected a marker, found {marker:#06x}")
        length = parser.u16()
        if length < 2:
            raise FormatError("marker segment length below minimum")
        body = _ByteParser(parser.take(length - 2))
        kind = marker & 0xFF
        if kind == 0xDB:
            while body.pos < len(body.data):
                pq_tq = body.u8()
                if pq_tq >> 4 != 0:
                    raise FormatError("only 8-bit quantization tables supported")
                steps = np.frombuffer(body.take(64), dtype=np.uint8)
                quant[pq_tq & 0x0F] = QuantTable(steps.astype(np.int64))
        elif kind == 0xC4:
            while body.pos < len(body.data):
                tc_th = body.u8()
                bits = (0,) + tuple(body.take(16))
                huffval = tuple(body.take(sum(bits)))
                spec = HuffmanSpec(bits=bits, huffval=huffval)
                huffman[(tc_th >> 4, tc_th & 0x0F)] = _HuffmanDecoder(spec)
        elif kind == 0xC0:
            precision = body.u8()
            if precision != 8:
                raise FormatError(f"unsupported sample precision {precision}")
            height = body.u16()
            width = body.u16()
            n_comp = body.u8()
            if n_comp != 3:
                raise FormatError(f"expected 3 components, found {n_comp}")
            comps = []
            for _ in range(3):
                cid = body.u8()
                hv = body.u8()
                tq = body.u8()
                comps.append((cid, hv >> 4, hv & 0x0F, tq))
            frame = (width, height, comps)
        elif kind in (0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7,
                      0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF):
            raise FormatError(f"unsupported frame type {marker:#06x}")
        elif kind == 0xDD:
            raise FormatError("restart intervals are not supported")
        elif kind == 0xDA:
            if frame is None:
                raise FormatError("scan begins before the frame header")
            ns = body.u8()
            if ns != 3:
                raise FormatError(f"expected a 3-component scan, found {ns}")
            scan_params = [(body.u8(), body.u8()) for _ in range(3)]
            ss, se, ahal = body.u8(), body.u8(), body.u8()
            if (ss, se, ahal) != (0, 63, 0):
                raise FormatError("non-baseline spectral selection parameters")
            break
        # APPn / COM and other tables-misc segments are skipped.

    width, height, comps = frame
    ids = [c[0] for c in comps]
    if ids != [1, 2, 3]:
        raise FormatError(f"unexpected component identifiers {ids}")
    sampling = [(c[1], c[2]) for c in comps]
    if sampling == [(1, 1), (1, 1), (1, 1)]:
        subsample = "444"
    elif sampling == [(2, 2), (1, 1), (1, 1)]:
        subsample = "420"
    else:
        raise FormatError(f"unsupported sampling layout {sampling}")

    if subsample == "444":
        bw = {"Y": -(-width // 8), "Cb": -(-width // 8), "Cr": -(-width // 8)}
        bh = {"Y": -(-height // 8), "Cb": -(-height // 8), "Cr": -(-height // 8)}
    else:
        bw = {"Y": 2 * -(-width // 16), "Cb": -(-width // 16), "Cr": -(-width // 16)}
        bh = {"Y": 2 * -(-height // 16), "Cb": -(-height // 16), "Cr": -(-height // 16)}

    names = ("Y", "Cb", "Cr")
    decoders = {}
    for (cid, _, _, tq), (scan_cid, tdta) in zip(comps, scan_params):
        if scan_cid != cid:
            raise FormatError("scan component order differs from the frame")
        name = names[cid - 1]
        td, ta = tdta >> 4, tdta & 0x0F
        if (0, td) not in huffman or (1, ta) not in huffman:
            raise FormatError("scan references an undefined Huffman table")
        if tq not in quant:
            raise FormatError("frame references an undefined quantization table")
        decoders[name] = (huffman[(0, td)], huffman[(1, ta)], tq)

    reader = BitReader(data, parser.pos)
    indices = {n: np.zeros((bw[n] * bh[n], 64), dtype=np.int64) for n in names}
    preds = {n: 0 for n in names}

    def read_component_block(name: str, block_index: int) -> None:
        dc, ac, _ = decoders[name]
        block, preds[name] = _decode_block(reader, dc, ac, preds[name])
        indices[name][block_index] = block

    if subsample == "444":
        for i in range(bw["Y"] * bh["Y"]):
            for name in names:
                read_component_block(name, i)
    else:
        luma_bw = bw["Y"]
        c = 0
        for my in range(bh["Cb"]):
            for mx in range(bw["Cb"]):
                for dy in range(2):
                    for dx in range(2):
                        read_component_block(
                            "Y", (2 * my + dy) * luma_bw + 2 * mx + dx)
                read_component_block("Cb", c)
                read_component_block("Cr", c)
                c += 1

    tail = data[reader.byte_align_pos():]
    if len(tail) < 2 or tail[:2] != b"\xff\xd9":
        raise FormatError("missing end-of-image marker after scan data")

    planes = {}
    for name in names:
        _, _, tq = decoders[name]
        coeffs = dequantize(indices[name], quant[tq])
        planes[name] = idct_plane(coeffs, bw[name])
    rgb = ycc_to_rgb(planes["Y"], planes["Cb"], planes["Cr"], width, height)
    return DecodedImage(samples=rgb.samples, width=width, height=height,
                        subsample=subsample, quant_tables=dict(quant),
                        indices=indices, blocks_wide=bw, blocks_high=bh)
