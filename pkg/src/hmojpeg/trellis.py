"""Soft-decision quantization search over run-length structure.

One block's AC coefficients are coded as (run, size, amplitude) triples, so
the choice at one position changes the rate of its neighbours. The search is
a shortest path over "position of the last nonzero coefficient": every
transition prices the skipped zeros (weighted distortion), the candidate
amplitude (weighted distortion), and the triple's idealized bits.

Exactness contract: the exhaustive reference below enumerates every candidate
assignment and prices it with the *same* compiled step functions in the same
accumulation order, so its minimum and the dynamic program's minimum are
bit-identical floats, not merely close.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import EOB_SYMBOL, ZRL_SYMBOL

MAX_AC_AMPLITUDE = 1023


@njit(cache=True, nogil=True)
def _zero_term(w_p, x_p):
    return w_p * (x_p * x_p)


@njit(cache=True, nogil=True)
def _zero_cost(w, x, lo, hi):
    """Weighted distortion of zeroing positions lo..hi, summed descending."""
    z = 0.0
    for p in range(hi, lo - 1, -1):
        z = z + _zero_term(w[p], x[p])
    return z


@njit(cache=True, nogil=True)
def _size_of(a):
    m = a if a >= 0 else -a
    s = 0
    while m > 0:
        s += 1
        m >>= 1
    return s


@njit(cache=True, nogil=True)
def _hard_index(v):
    av = -v if v < 0.0 else v
    h = int(math.floor(av + 0.5))
    return -h if v < 0.0 else h


@njit(cache=True, nogil=True)
def _step_cost(cost_in, zc, w_j, x_j, q_j, a, run, beta, bits):
    """Price one transition: skipped zeros, amplitude a at j, triple bits."""
    d = x_j - q_j * a
    amp = w_j * (d * d)
    s = _size_of(a)
    nzrl = run // 16
    r = run - nzrl * 16
    rate = nzrl * bits[ZRL_SYMBOL] + bits[r * 10 + (s - 1)] + s
    return ((cost_in + zc) + amp) + beta * rate


@njit(cache=True, nogil=True)
def _end_cost(cost_in, zc, beta, bits):
    return (cost_in + zc) + beta * bits[EOB_SYMBOL]


@njit(cache=True, nogil=True)
def trellis_block_kernel(x, w, q, bits, beta, radius, length):
    """Minimum-cost AC assignment for one block.

    x, w, q: (64,) float64 in zigzag order; bits: (162,) idealized code
    lengths; length: number of positions considered (64 for a full block).
    Returns (indices[64] int64, minimal cost). Position 0 is left untouched.
    """
    inf = np.inf
    cost_to = np.full(64, inf)
    amp_at = np.zeros(64, dtype=np.int64)
    parent = np.full(64, -1, dtype=np.int64)
    nz_to = np.zeros(64, dtype=np.int64)
    cost_to[0] = 0.0
    for j in range(1, length):
        h = _hard_index(x[j] / q[j])
        best = inf
        best_a = 0
        best_p = -1
        best_nz = 1 << 40
        zc = 0.0
        for i in range(j - 1, -1, -1):
            if i < j - 1:
                zc = zc + _zero_term(w[i + 1], x[i + 1])
            ci = cost_to[i]
            if ci == inf:
                continue
            run = j - i - 1
            for a in range(h - radius, h + radius + 1):
                if a == 0 or a > MAX_AC_AMPLITUDE or a < -MAX_AC_AMPLITUDE:
                    continue
                c = _step_cost(ci, zc, w[j], x[j], q[j], a, run, beta, bits)
                # Ties: fewer nonzero coefficients, then smaller amplitude.
                nz = nz_to[i] + 1
                take = c < best
                if c == best:
                    if nz < best_nz:
                        take = True
                    elif nz == best_nz:
                        aa = a if a >= 0 else -a
                        bb = best_a if best_a >= 0 else -best_a
                        take = aa < bb
                if take:
                    best = c
                    best_a = a
                    best_p = i
                    best_nz = nz
        cost_to[j] = best
        amp_at[j] = best_a
        parent[j] = best_p
        nz_to[j] = best_nz

    best_total = inf
    best_end = -1
    best_end_nz = 1 << 40
    for i in range(length):
        ci = cost_to[i]
        if ci == inf:
            continue
        if i == length - 1:
            c = ci
        else:
            zc = _zero_cost(w, x, i + 1, length - 1)
            c = _end_cost(ci, zc, beta, bits)
        if c < best_total or (c == best_total and nz_to[i] < best_end_nz):
            best_total = c
            best_end = i
            best_end_nz = nz_to[i]

    indices = np.zeros(64, dtype=np.int64)
    p = best_end
    while p > 0:
        indices[p] = amp_at[p]
        p = parent[p]
    return indices, best_total


@njit(cache=True, nogil=True)
def trellis_plane_kernel(blocks, w, q, bits, beta, radius):
    """Run the block search over a whole plane; returns indices and costs."""
    n = blocks.shape[0]
    out = np.zeros((n, 64), dtype=np.int64)
    costs = np.zeros(n)
    for b in range(n):
        idx, c = trellis_block_kernel(blocks[b], w, q, bits, beta, radius, 64)
        out[b] = idx
        costs[b] = c
    return out, costs


@njit(cache=True, nogil=True)
def exhaustive_min_cost(x, w, q, bits, beta, radius, length):
    """Reference minimum by brute force over all candidate assignments.

    Each position may be zero or any in-window nonzero amplitude; every
    assignment is priced with the shared step functions, walking nonzero
    positions left to right exactly as the dynamic program does.
    """
    npos = length - 1
    width = 2 * radius + 2
    cand = np.zeros((npos, width), dtype=np.int64)
    ncand = np.zeros(npos, dtype=np.int64)
    for t in range(npos):
        j = t + 1
        h = _hard_index(x[j] / q[j])
        cand[t, 0] = 0
        ncand[t] = 1
        for a in range(h - radius, h + radius + 1):
            if a == 0 or a > MAX_AC_AMPLITUDE or a < -MAX_AC_AMPLITUDE:
                continue
            cand[t, ncand[t]] = a
            ncand[t] += 1

    sel = np.zeros(npos, dtype=np.int64)
    best = np.inf
    while True:
        cost = 0.0
        last = 0
        for t in range(npos):
            a = cand[t, sel[t]]
            if a == 0:
                continue
            j = t + 1
            run = j - last - 1
            zc = _zero_cost(w, x, last + 1, j - 1)
            cost = _step_cost(cost, zc, w[j], x[j], q[j], a, run, beta, bits)
            last = j
        if last < length - 1:
            zc = _zero_cost(w, x, last + 1, length - 1)
            cost = _end_cost(cost, zc, beta, bits)
        if cost < best:
            best = cost
        t = 0
        while t < npos:
            sel[t] += 1
            if sel[t] < ncand[t]:
                break
            sel[t] = 0
            t += 1
        if t == npos:
            break
    return best


def warm_kernels() -> None:
    """Force compilation of every kernel once (they are disk-cached after)."""
    x = np.linspace(-40.0, 40.0, 64)
    w = np.ones(64)
    q = np.full(64, 8.0)
    bits = np.full(162, 6.0)
    trellis_plane_kernel(x[None, :].copy(), w, q, bits, 1.0, 1)
    exhaustive_min_cost(x, w, q, bits, 1.0, 1, 9)
