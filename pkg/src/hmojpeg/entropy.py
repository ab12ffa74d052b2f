"""Run-length coding of quantization indices and Huffman table construction.

The run-length layer is exactly baseline JPEG: DPCM-coded DC followed by
(run, size, amplitude) triples with ZRL for zero runs of 16 and EOB for the
zero tail. Huffman code lengths come from a textbook frequency merge,
limited to 16 bits by the standard BITS adjustment.
"""

from __future__ import annotations

import heapq
from collections import Counter

import numpy as np

from .model import (
    HuffmanSpec,
    N_RS_SYMBOLS,
    RunLengthSequence,
    rs_pair,
    rs_symbol,
    size_category,
)

EOB = (0, 0, 0)
ZRL = (15, 0, 0)


def ac_run_lengths(indices: np.ndarray) -> tuple[tuple[int, int, int], ...]:
    """Run-length code the 63 AC indices of one block (zigzag order)."""
    ac = []
    run = 0
    for pos in range(1, 64):
        a = int(indices[pos])
        if a == 0:
            run += 1
            continue
        while run > 15:
            ac.append(ZRL)
            run -= 16
        ac.append((run, size_category(a), a))
        run = 0
    if run > 0:
        ac.append(EOB)
    return tuple(ac)


def build_run_lengths(indices: np.ndarray, prev_dc: int) -> RunLengthSequence:
    """Full run-length coding of one block, DC differential included."""
    diff = int(indices[0]) - int(prev_dc)
    return RunLengthSequence(dc_size=size_category(diff), dc_diff=diff,
                             ac=ac_run_lengths(indices))


def decode_run_lengths(seq: RunLengthSequence, prev_dc: int) -> np.ndarray:
    """Invert :func:`build_run_lengths`; returns the 64 indices."""
    indices = np.zeros(64, dtype=np.int64)
    indices[0] = prev_dc + seq.dc_diff
    pos = 1
    for triple in seq.ac:
        if triple == EOB:
            break
        if triple == ZRL:
            pos += 16
            continue
        r, s, a = triple
        pos += r
        if pos > 63:
            raise ValueError("run-length sequence overruns the block")
        indices[pos] = a
        pos += 1
    return indices


def ac_indices_from_run_lengths(ac: tuple[tuple[int, int, int], ...]) -> np.ndarray:
    """AC-only variant of :func:`decode_run_lengths` (63 entries)."""
    full = decode_run_lengths(
        RunLengthSequence(dc_size=0, dc_diff=0, ac=ac), prev_dc=0)
    return full[1:]


def count_rs_symbols(ac_lists) -> np.ndarray:
    """Count (run, size) symbol occurrences over many blocks' AC codes."""
    counts = np.zeros(N_RS_SYMBOLS, dtype=np.int64)
    for ac in ac_lists:
        for r, s, _ in ac:
            counts[rs_symbol(r, s)] += 1
    return counts


# ---------------------------------------------------------------------------
# Huffman construction

_DUMMY = 0x10000  # sorts after every real symbol, so it takes the last code


def huffman_code_lengths(weights: dict[int, float]) -> dict[int, int]:
    """Optimal prefix code lengths by the classic two-least merge.

    This is the plain textbook stage: a single symbol gets length 1,
    four equal weights all get length 2, and no reserved code is held
    back. Wire tables add that on top (see :func:`build_huffman_table`).
    """
    heap = []
    for tiebreak, (sym, w) in enumerate(sorted(weights.items())):
        heapq.heappush(heap, (w, tiebreak, [sym]))
    lengths = Counter()
    if len(heap) == 1:
        return {heap[0][2][0]: 1}
    while len(heap) > 1:
        w1, t1, syms1 = heapq.heappop(heap)
        w2, _, syms2 = heapq.heappop(heap)
        for sym in syms1 + syms2:
            lengths[sym] += 1
        heapq.heappush(heap, (w1 + w2, t1, syms1 + syms2))
    return dict(lengths)


def _limit_to_16(bits: list[int]) -> list[int]:
    """Standard JPEG BITS adjustment: fold code lengths beyond 16 back in."""
    bits = list(bits)
    for i in range(len(bits) - 1, 16, -1):
        while bits[i] > 0:
            j = i - 2
            while bits[j] == 0:
                j -= 1
            bits[i] -= 2
            bits[i - 1] += 1
            bits[j + 1] += 2
            bits[j] -= 1
    return bits[:17] + [0] * (17 - len(bits[:17]))


def _assign(weights: dict[int, float]) -> tuple[list[int], list[int], dict[int, int]]:
    lengths = huffman_code_lengths(weights)
    maxlen = max(lengths.values())
    bits = [0] * (max(maxlen + 1, 17))
    for length in lengths.values():
        bits[length] += 1
    bits = _limit_to_16(bits)
    # Reassign the adjusted histogram to symbols ordered by original length,
    # ties broken by symbol value.
    order = sorted(lengths, key=lambda sym: (lengths[sym], sym))
    final_lengths = {}
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length]):
            final_lengths[order[k]] = length
            k += 1
    huffval = sorted(final_lengths, key=lambda sym: (final_lengths[sym], sym))
    return bits, huffval, final_lengths


def build_huffman_table(weights: dict[int, float]) -> HuffmanSpec:
    """Build a decoder-legal Huffman spec from positive symbol weights.

    Code lengths are Huffman-optimal and limited to 16 bits by the standard
    BITS adjustment. A throwaway symbol with strictly smallest weight is
    always included and then dropped from the longest code length, so the
    canonical assignment never uses the all-ones code word of the maximum
    length: reference decoders reject tables whose code space is completely
    full.
    """
    weights = {int(s): float(w) for s, w in weights.items() if w > 0}
    if not weights:
        raise ValueError("at least one symbol with positive weight required")
    if len(weights) > 256:
        raise ValueError("more than 256 symbols cannot share one table")
    if any(not (0 <= s <= 255) for s in weights):
        raise ValueError("symbols must be single bytes")

    dummy_weight = min(weights.values()) / 2.0
    bits, huffval, final_lengths = _assign({**weights, _DUMMY: dummy_weight})
    # The smallest weight sits at maximum depth, and _DUMMY sorts after every
    # byte, so it always holds the very last (deepest) slot.
    if huffval[-1] != _DUMMY:
        raise AssertionError("reserved symbol did not take the last code")
    bits = list(bits)
    bits[final_lengths[_DUMMY]] -= 1
    huffval = huffval[:-1]
    return HuffmanSpec(bits=tuple(bits), huffval=tuple(huffval))


def rs_wire_byte(symbol: int) -> int:
    """JPEG scan byte (run << 4 | size) for an internal (run, size) id."""
    r, s = rs_pair(symbol)
    return (r << 4) | s


def build_huffman(dist) -> HuffmanSpec:
    """Huffman spec for an RlsDistribution, keyed by JPEG scan bytes.

    Raw counts are preferred; the smoothed mass is used only when no
    symbol has been observed yet.
    """
    if dist.counts.sum() > 0:
        weights = {rs_wire_byte(s): int(c)
                   for s, c in enumerate(dist.counts) if c > 0}
    else:
        weights = {rs_wire_byte(s): float(p)
                   for s, p in enumerate(dist.probs) if p > 0}
    return build_huffman_table(weights)


# ---------------------------------------------------------------------------
# ITU-T T.81 Annex K default Huffman tables (the non-optimized JPEG arm).

STD_DC_LUMA = HuffmanSpec(
    bits=(0, 0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0),
    huffval=tuple(range(12)))

STD_DC_CHROMA = HuffmanSpec(
    bits=(0, 0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0),
    huffval=tuple(range(12)))

STD_AC_LUMA = HuffmanSpec(
    bits=(0, 0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125),
    huffval=(
        0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41,
        0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91,
        0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24,
        0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A,
        0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38,
        0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53,
        0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66,
        0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
        0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93,
        0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
        0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7,
        0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
        0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1,
        0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2,
        0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA))

STD_AC_CHROMA = HuffmanSpec(
    bits=(0, 0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119),
    huffval=(
        0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12,
        0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14,
        0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15,
        0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17,
        0x18, 0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37,
        0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A,
        0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65,
        0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78,
        0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A,
        0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
        0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5,
        0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7,
        0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9,
        0xDA, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2,
        0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA))
