"""Alternating rate-distortion optimization of one image.

Three coordinate blocks are cycled until the joint cost stops improving:

1. block search — re-decide every AC coefficient given the current
   quantization table and triple distribution (exact minimizer);
2. table update — per-frequency closed-form integer step size given the
   decisions (exact minimizer, rate unchanged);
3. distribution update — re-estimate triple probabilities from the new
   decisions, kept only if it does not increase the modelled rate.

Each phase can only lower the cost, so the recorded trace is nonincreasing.
Chroma planes are optimized jointly: they share one table and one
distribution, as they do in the emitted file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .color import rgb_to_ycc
from .dct import fdct_plane
from .entropy import ac_run_lengths, build_huffman, count_rs_symbols
from .hmoe import HmoeWeights, channel_weights
from .jfif import (
    PlaneCode,
    RateReport,
    build_dc_huffman,
    dc_size_counts,
    encode_jfif,
    mcu_order_420,
)
from .model import (
    ANNEX_K_CHROMA,
    ANNEX_K_LUMA,
    N_RS_SYMBOLS,
    QuantTable,
    RgbImage,
    RlsDistribution,
    quality_scaled_table,
    size_category,
)
from .quantize import round_half_away
from .sensitivity import SensitivityTable, map_sensitivity
from .trellis import trellis_block_kernel, trellis_plane_kernel

# Amplitude bits per triple symbol: size for regular symbols, none for
# EOB/ZRL.
_AMPLITUDE_BITS = np.array([(s % 10) + 1 for s in range(160)] + [0, 0],
                           dtype=np.float64)


@dataclass(frozen=True)
class OptimizerConfig:
    lam: float = 0.0
    beta: float = 1.0
    quality: int = 75
    radius: int = 1
    max_iters: int = 10
    epsilon: float = 1e-4
    subsample: str = "444"

    def __post_init__(self):
        if self.beta < 0 or self.lam < 0:
            raise ValueError("beta and lambda must be >= 0")
        if not 1 <= self.quality <= 100:
            raise ValueError(f"quality must be in 1..100, got {self.quality}")
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.subsample not in ("444", "420"):
            raise ValueError(f"unsupported subsampling mode {self.subsample!r}")


@dataclass(frozen=True)
class IterationTrace:
    """Joint cost after each phase of one iteration."""

    iteration: int
    cost_after_trellis: float
    cost_after_q_update: float
    cost_after_distribution: float


def trace_sequence(traces: list[IterationTrace]) -> list[float]:
    """The full phase-by-phase cost sequence, for monotonicity checks."""
    out: list[float] = []
    for t in traces:
        out.extend((t.cost_after_trellis, t.cost_after_q_update,
                    t.cost_after_distribution))
    return out


def init_distribution(counts: np.ndarray) -> RlsDistribution:
    """Add-one-smoothed triple distribution from observed counts."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (N_RS_SYMBOLS,) or np.any(counts < 0):
        raise ValueError("counts must be 162 nonnegative integers")
    probs = (counts + 1.0) / (counts.sum() + N_RS_SYMBOLS)
    return RlsDistribution(counts=counts, probs=probs)


def update_distribution(counts: np.ndarray,
                        previous: RlsDistribution) -> RlsDistribution:
    """Re-estimate, but never let the modelled rate of `counts` grow."""
    candidate = init_distribution(counts)
    counts = candidate.counts.astype(np.float64)
    if float(counts @ candidate.code_bits()) <= float(counts @ previous.code_bits()):
        return candidate
    return RlsDistribution(counts=candidate.counts, probs=previous.probs)


def trellis_block(x: np.ndarray, weights: HmoeWeights, q: QuantTable,
                  dist: RlsDistribution, beta: float, radius: int = 1,
                  length: int = 64) -> tuple[np.ndarray, float]:
    """Minimum-cost AC decisions for one block (position 0 untouched)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (64,):
        raise ValueError(f"expected one 64-coefficient block, got {x.shape}")
    if not 2 <= length <= 64:
        raise ValueError(f"length must be in 2..64, got {length}")
    return trellis_block_kernel(x, weights.values,
                                q.steps.astype(np.float64),
                                dist.code_bits(), float(beta), int(radius),
                                int(length))


def update_q(blocks_list: list[np.ndarray], indices_list: list[np.ndarray],
             weights_list: list[HmoeWeights], q: QuantTable) -> QuantTable:
    """Closed-form per-frequency integer step sizes given fixed decisions.

    For frequency i the distortion is a parabola in q_i, so the integer
    minimizer is the rounded stationary point, clamped to [1, 255]. The DC
    step is never changed (DC is coded by hard decision throughout).
    Frequencies whose decisions are all zero keep their current step.
    """
    if not blocks_list or len(blocks_list) != len(indices_list):
        raise ValueError("need matching block and index arrays")
    num = np.zeros(64)
    den = np.zeros(64)
    for blocks, indices, weights in zip(blocks_list, indices_list,
                                        weights_list):
        scaled = indices.astype(np.float64)
        num += weights.values * np.sum(blocks * scaled, axis=0)
        den += weights.values * np.sum(scaled * scaled, axis=0)
    steps = q.steps.astype(np.float64).copy()
    active = den > 0
    active[0] = False
    steps[active] = np.clip(np.floor(num[active] / den[active] + 0.5), 1, 255)
    return QuantTable(steps.astype(np.int64))


def _ac_counts(indices_list: list[np.ndarray]) -> np.ndarray:
    counts = np.zeros(N_RS_SYMBOLS, dtype=np.int64)
    for indices in indices_list:
        counts += count_rs_symbols(ac_run_lengths(row) for row in indices)
    return counts


def joint_cost(blocks_list: list[np.ndarray], indices_list: list[np.ndarray],
               weights_list: list[HmoeWeights], q: QuantTable,
               dist: RlsDistribution, beta: float) -> float:
    """Weighted AC distortion plus beta times the modelled AC bits.

    This single evaluator produces every trace point, so consecutive points
    are comparable to within floating-point summation noise.
    """
    steps = q.steps.astype(np.float64)
    distortion = 0.0
    for blocks, indices, weights in zip(blocks_list, indices_list,
                                        weights_list):
        diff = blocks[:, 1:] - indices[:, 1:] * steps[1:]
        distortion += float(np.sum(diff * diff * weights.values[1:]))
    counts = _ac_counts(indices_list).astype(np.float64)
    rate = float(counts @ (dist.code_bits() + _AMPLITUDE_BITS))
    return distortion + beta * rate


@dataclass
class PlaneGroupResult:
    """Converged decisions for one table-sharing group of planes."""

    indices: list[np.ndarray]
    q: QuantTable
    dist: RlsDistribution
    traces: list[IterationTrace] = field(default_factory=list)


def _optimize_group(blocks_list: list[np.ndarray],
                    weights_list: list[HmoeWeights], q0: QuantTable,
                    beta: float, radius: int, max_iters: int,
                    epsilon: float) -> PlaneGroupResult:
    q = q0
    qsteps = q.steps.astype(np.float64)
    hard = [round_half_away(blocks / qsteps).astype(np.int64)
            for blocks in blocks_list]
    dist = init_distribution(_ac_counts(hard))
    traces: list[IterationTrace] = []
    indices_list = hard
    prev_cost = None
    for iteration in range(max_iters):
        bits = dist.code_bits()
        qsteps = q.steps.astype(np.float64)
        indices_list = []
        for blocks, weights in zip(blocks_list, weights_list):
            idx, _ = trellis_plane_kernel(
                np.ascontiguousarray(blocks), weights.values, qsteps, bits,
                float(beta), int(radius))
            indices_list.append(idx)
        c_trellis = joint_cost(blocks_list, indices_list, weights_list, q,
                               dist, beta)

        q = update_q(blocks_list, indices_list, weights_list, q)
        c_update = joint_cost(blocks_list, indices_list, weights_list, q,
                              dist, beta)

        dist = update_distribution(_ac_counts(indices_list), dist)
        c_dist = joint_cost(blocks_list, indices_list, weights_list, q, dist,
                            beta)

        traces.append(IterationTrace(iteration, c_trellis, c_update, c_dist))
        if prev_cost is not None:
            if prev_cost - c_dist <= epsilon * max(1.0, abs(prev_cost)):
                break
        prev_cost = c_dist
    return PlaneGroupResult(indices=indices_list, q=q, dist=dist,
                            traces=traces)


def optimize_luma(blocks: np.ndarray, weights: HmoeWeights, q0: QuantTable,
                  beta: float, radius: int = 1, max_iters: int = 10,
                  epsilon: float = 1e-4) -> PlaneGroupResult:
    return _optimize_group([blocks], [weights], q0, beta, radius, max_iters,
                           epsilon)


def optimize_chroma_joint(blocks_cb: np.ndarray, blocks_cr: np.ndarray,
                          weights_cb: HmoeWeights, weights_cr: HmoeWeights,
                          q0: QuantTable, beta: float, radius: int = 1,
                          max_iters: int = 10,
                          epsilon: float = 1e-4) -> PlaneGroupResult:
    return _optimize_group([blocks_cb, blocks_cr], [weights_cb, weights_cr],
                           q0, beta, radius, max_iters, epsilon)


@dataclass(frozen=True)
class CompressResult:
    data: bytes
    report: RateReport
    traces: dict[str, list[IterationTrace]]
    q_luma: QuantTable
    q_chroma: QuantTable
    indices: dict[str, np.ndarray]


def _dc_ideal_bits(size_lists: list[list[int]]) -> float:
    """Idealized DPCM bits for components sharing one size distribution."""
    sizes = [s for sizes in size_lists for s in sizes]
    values, counts = np.unique(np.asarray(sizes), return_counts=True)
    probs = counts / counts.sum()
    code_bits = {int(v): -np.log2(p) for v, p in zip(values, probs)}
    return float(sum(code_bits[s] + s for s in sizes))


def _dc_sizes(dc_indices: np.ndarray, scan_order=None) -> list[int]:
    order = range(len(dc_indices)) if scan_order is None else scan_order
    sizes = []
    pred = 0
    for i in order:
        sizes.append(size_category(int(dc_indices[i]) - pred))
        pred = int(dc_indices[i])
    return sizes


def compress_hmosdq(img: RgbImage, sensitivity: SensitivityTable | None,
                    config: OptimizerConfig) -> CompressResult:
    """Full pipeline: optimize all three planes jointly and emit the file."""
    short_side = min(img.width, img.height)
    if sensitivity is not None and config.lam > 0:
        if short_side < sensitivity.resolution:
            raise ValueError(
                f"image short side {short_side} is below the table's "
                f"measurement side {sensitivity.resolution}; the mapping "
                "only redistributes toward equal or larger sides")
        sensitivity = map_sensitivity(sensitivity, short_side)

    planes = rgb_to_ycc(img, config.subsample)
    dct = {name: fdct_plane(plane, name)
           for name, plane in (("Y", planes.y), ("Cb", planes.cb),
                               ("Cr", planes.cr))}
    weights = {name: channel_weights(sensitivity, config.lam, name)
               for name in ("Y", "Cb", "Cr")}
    q0_luma = QuantTable(quality_scaled_table(ANNEX_K_LUMA, config.quality))
    q0_chroma = QuantTable(quality_scaled_table(ANNEX_K_CHROMA, config.quality))

    luma = optimize_luma(dct["Y"].blocks, weights["Y"], q0_luma, config.beta,
                         config.radius, config.max_iters, config.epsilon)
    chroma = optimize_chroma_joint(dct["Cb"].blocks, dct["Cr"].blocks,
                                   weights["Cb"], weights["Cr"], q0_chroma,
                                   config.beta, config.radius,
                                   config.max_iters, config.epsilon)

    indices = {"Y": luma.indices[0], "Cb": chroma.indices[0],
               "Cr": chroma.indices[1]}
    for name, q in (("Y", luma.q), ("Cb", chroma.q), ("Cr", chroma.q)):
        steps = q.steps.astype(np.float64)
        indices[name][:, 0] = round_half_away(
            dct[name].blocks[:, 0] / steps[0]).astype(np.int64)

    codes = {name: PlaneCode.from_indices(indices[name],
                                          dct[name].blocks_wide,
                                          dct[name].blocks_high)
             for name in ("Y", "Cb", "Cr")}

    luma_scan = (mcu_order_420(codes["Y"].blocks_wide, codes["Y"].blocks_high)
                 if config.subsample == "420" else None)
    cb_counts = dc_size_counts(codes["Cb"].dc_indices)
    cr_counts = dc_size_counts(codes["Cr"].dc_indices)
    dc_luma = build_dc_huffman(dc_size_counts(codes["Y"].dc_indices,
                                              luma_scan))
    dc_chroma = build_dc_huffman(
        {s: cb_counts.get(s, 0) + cr_counts.get(s, 0)
         for s in set(cb_counts) | set(cr_counts)})
    ac_luma = build_huffman(
        RlsDistribution(counts=_ac_counts([indices["Y"]]),
                        probs=luma.dist.probs))
    ac_chroma = build_huffman(
        RlsDistribution(counts=_ac_counts([indices["Cb"], indices["Cr"]]),
                        probs=chroma.dist.probs))

    data, report = encode_jfif(codes["Y"], codes["Cb"], codes["Cr"],
                               luma.q, chroma.q, dc_luma, ac_luma, dc_chroma,
                               ac_chroma, img.width, img.height,
                               config.subsample)

    luma_counts = _ac_counts([indices["Y"]]).astype(np.float64)
    chroma_counts = _ac_counts([indices["Cb"],
                                indices["Cr"]]).astype(np.float64)
    ideal = float(luma_counts @ (init_distribution(
        luma_counts.astype(np.int64)).code_bits() + _AMPLITUDE_BITS))
    ideal += float(chroma_counts @ (init_distribution(
        chroma_counts.astype(np.int64)).code_bits() + _AMPLITUDE_BITS))
    ideal += _dc_ideal_bits([_dc_sizes(codes["Y"].dc_indices, luma_scan)])
    ideal += _dc_ideal_bits([_dc_sizes(codes["Cb"].dc_indices),
                             _dc_sizes(codes["Cr"].dc_indices)])
    report = dataclasses.replace(report, ideal_bits=ideal)

    return CompressResult(data=data, report=report,
                          traces={"Y": luma.traces, "C": chroma.traces},
                          q_luma=luma.q, q_chroma=chroma.q, indices=indices)
