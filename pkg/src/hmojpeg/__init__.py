"""Rate-distortion optimized baseline image compression.

The library jointly optimizes quantization tables, per-coefficient
quantization decisions, and entropy-code statistics under a weighted
frequency-domain distortion measure, and emits standard baseline files
that any decoder can read. Weights may come from model-gradient
sensitivity tables, turning the codec toward machine consumers.
"""

from .bitstream import BitReader, BitWriter, EntropyError, TruncatedError
from .color import blocks_to_plane, plane_to_blocks, rgb_to_ycc, ycc_to_rgb
from .dct import fdct_block, fdct_plane, idct_block, idct_plane
from .decoder import DecodedImage, FormatError, decode_jfif
from .entropy import (
    STD_AC_CHROMA,
    STD_AC_LUMA,
    STD_DC_CHROMA,
    STD_DC_LUMA,
    ac_run_lengths,
    build_huffman,
    build_huffman_table,
    build_run_lengths,
    count_rs_symbols,
    decode_run_lengths,
    huffman_code_lengths,
)
from .hmoe import HmoeWeights, build_weights, channel_weights, hmoe_block
from .jfif import PlaneCode, RateReport, encode_baseline, encode_jfif
from .manifest import (
    MANIFEST_TAG,
    ManifestFormatError,
    read_manifest,
    write_manifest,
)
from .metrics import bits_per_pixel, mse, psnr
from .model import (
    ANNEX_K_CHROMA,
    ANNEX_K_LUMA,
    EOB_SYMBOL,
    N_RS_SYMBOLS,
    ZRL_SYMBOL,
    HmojpegError,
    HuffmanSpec,
    QuantTable,
    RgbImage,
    RlsDistribution,
    RunLengthSequence,
    YccPlanes,
    decode_magnitude,
    magnitude_code,
    quality_scaled_table,
    rs_pair,
    rs_symbol,
    size_category,
    zigzag_index,
    zigzag_rowcol,
)
from .quantize import dequantize, hard_quantize, round_half_away
from .sdq import (
    CompressResult,
    IterationTrace,
    OptimizerConfig,
    PlaneGroupResult,
    compress_hmosdq,
    init_distribution,
    joint_cost,
    optimize_chroma_joint,
    optimize_luma,
    trace_sequence,
    trellis_block,
    update_distribution,
    update_q,
)
from .sensitivity import (
    AsmJacobian,
    SensitivityFormatError,
    SensitivityTable,
    build_asm_jacobian,
    load_sensitivity,
    map_sensitivity,
    save_sensitivity,
    uniform_table,
)

__version__ = "0.1.0"

__all__ = [
    "ANNEX_K_CHROMA", "ANNEX_K_LUMA", "AsmJacobian", "BitReader", "BitWriter",
    "CompressResult", "DecodedImage", "EOB_SYMBOL", "EntropyError",
    "FormatError", "HmoeWeights", "HmojpegError", "HuffmanSpec",
    "IterationTrace", "MANIFEST_TAG", "ManifestFormatError", "N_RS_SYMBOLS",
    "OptimizerConfig", "PlaneCode", "PlaneGroupResult", "QuantTable",
    "RateReport", "RgbImage", "RlsDistribution", "RunLengthSequence",
    "STD_AC_CHROMA", "STD_AC_LUMA", "STD_DC_CHROMA", "STD_DC_LUMA",
    "SensitivityFormatError", "SensitivityTable", "TruncatedError",
    "YccPlanes", "ZRL_SYMBOL", "ac_run_lengths", "bits_per_pixel",
    "blocks_to_plane", "build_asm_jacobian", "build_huffman",
    "build_huffman_table", "build_run_lengths", "build_weights",
    "channel_weights", "compress_hmosdq", "count_rs_symbols",
    "decode_jfif", "decode_magnitude", "decode_run_lengths", "dequantize",
    "encode_baseline", "encode_jfif", "fdct_block", "fdct_plane",
    "hard_quantize", "hmoe_block", "huffman_code_lengths", "idct_block",
    "idct_plane",
    "init_distribution", "joint_cost", "load_sensitivity", "magnitude_code",
    "map_sensitivity", "mse", "optimize_chroma_joint", "optimize_luma",
    "plane_to_blocks", "psnr", "quality_scaled_table", "read_manifest",
    "rgb_to_ycc", "round_half_away", "rs_pair", "rs_symbol",
    "save_sensitivity", "size_category", "trace_sequence", "trellis_block",
    "uniform_table", "update_distribution", "update_q", "write_manifest",
    "ycc_to_rgb", "zigzag_index", "zigzag_rowcol",
]
