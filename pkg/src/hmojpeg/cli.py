"""Command line front end.

Subcommands: ``compress`` (one image), ``sweep`` (a corpus across rate
points, with a CSV manifest), ``metrics`` (rate/quality of an existing
file), ``asm`` (re-express a sensitivity table at another short side).
Each error class maps to its own exit code so callers can tell bad inputs
from corrupt streams without parsing messages.
"""

from __future__ import annotations

import concurrent.futures
import os
import sys

import click
import numpy as np
from PIL import Image

from .bitstream import EntropyError, TruncatedError
from .decoder import FormatError, decode_jfif
from .manifest import ManifestFormatError, write_manifest
from .metrics import psnr
from .model import HmojpegError, RgbImage
from .sdq import OptimizerConfig, compress_hmosdq
from .sensitivity import (
    SensitivityFormatError,
    load_sensitivity,
    map_sensitivity,
    save_sensitivity,
)

EXIT_FORMAT = 3
EXIT_ENTROPY = 4
EXIT_SENSITIVITY = 5
EXIT_MANIFEST = 6
EXIT_DOMAIN = 7

THREADS_ENV = "HMOJPEG_THREADS"


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _handle(exc: Exception) -> None:
    if isinstance(exc, SensitivityFormatError):
        _fail(EXIT_SENSITIVITY, str(exc))
    if isinstance(exc, ManifestFormatError):
        _fail(EXIT_MANIFEST, str(exc))
    if isinstance(exc, FormatError):
        _fail(EXIT_FORMAT, str(exc))
    if isinstance(exc, (EntropyError, TruncatedError)):
        _fail(EXIT_ENTROPY, str(exc))
    if isinstance(exc, (HmojpegError, ValueError, OSError)):
        _fail(EXIT_DOMAIN, str(exc))
    raise exc


def _load_rgb(path: str) -> RgbImage:
    with Image.open(path) as im:
        samples = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return RgbImage(width=samples.shape[1], height=samples.shape[0],
                    samples=samples)


def _atomic_write(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def _betas(beta: tuple[float, ...], beta_range: str | None) -> list[float]:
    values = list(beta)
    if beta_range is not None:
        parts = beta_range.split(":")
        if len(parts) != 3:
            raise ValueError(
                f"--beta-range must be START:STOP:COUNT, got {beta_range!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if start <= 0 or stop <= 0 or count < 2:
            raise ValueError("--beta-range needs positive ends and count >= 2")
        values.extend(float(b) for b in np.geomspace(start, stop, count))
    if not values:
        raise ValueError("give at least one --beta or a --beta-range")
    if any(b < 0 for b in values):
        raise ValueError("beta must be >= 0")
    return sorted(set(values))


def _compress_one(path: str, out_path: str, sens, config: OptimizerConfig):
    img = _load_rgb(path)
    result = compress_hmosdq(img, sens, config)
    _atomic_write(out_path, result.data)
    decoded = decode_jfif(result.data)
    quality_db = psnr(img.samples, decoded.samples)
    return img, result, quality_db


def _image_row(path: str, out_path: str, config: OptimizerConfig, result,
               quality_db: float) -> dict:
    return {
        "row_type": "image", "image": path, "out_path": out_path,
        "beta": config.beta, "lambda": config.lam,
        "quality": config.quality, "subsample": config.subsample,
        "width": result.report.width, "height": result.report.height,
        "total_bits": result.report.total_bits,
        "entropy_bits": result.report.entropy_bits,
        "ideal_bits": result.report.ideal_bits,
        "bpp": result.report.bpp, "psnr_db": quality_db,
    }


@click.group()
def main() -> None:
    """Rate-distortion optimized baseline image compression."""


_shared_options = [
    click.option("--lambda", "lam", type=float, default=0.0,
                 show_default=True,
                 help="Sensitivity weighting strength (0 = plain squared "
                      "error)."),
    click.option("--quality", type=int, default=75, show_default=True,
                 help="Quality setting for the initial tables (1..100)."),
    click.option("--sensitivity", "sensitivity_path", type=str, default=None,
                 help="Sensitivity table JSON (required when --lambda > 0)."),
    click.option("--radius", type=int, default=1, show_default=True,
                 help="Half-width of the candidate window per coefficient."),
    click.option("--max-iters", type=int, default=10, show_default=True,
                 help="Cap on optimization iterations per plane group."),
    click.option("--epsilon", type=float, default=1e-4, show_default=True,
                 help="Relative cost improvement that counts as converged."),
    click.option("--subsample", type=click.Choice(["444", "420"]),
                 default="444", show_default=True,
                 help="Chroma subsampling layout."),
]


def _with_shared_options(fn):
    for option in reversed(_shared_options):
        fn = option(fn)
    return fn


def _build_config(lam, beta, quality, radius, max_iters, epsilon,
                  subsample) -> OptimizerConfig:
    return OptimizerConfig(lam=lam, beta=beta, quality=quality, radius=radius,
                           max_iters=max_iters, epsilon=epsilon,
                           subsample=subsample)


def _load_sensitivity_if_needed(path: str | None, lam: float):
    if lam > 0 and path is None:
        raise ValueError("--lambda > 0 requires --sensitivity")
    return load_sensitivity(path) if path is not None else None


@main.command()
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.option("--beta", type=float, default=1.0, show_default=True,
              help="Rate weight in the joint cost.")
@click.option("--out", "out_path", type=str, required=True,
              help="Output file path.")
@click.option("--manifest", "manifest_path", type=str, default=None,
              help="Also write a one-row CSV manifest here.")
@_with_shared_options
def compress(image, beta, out_path, manifest_path, lam, quality,
             sensitivity_path, radius, max_iters, epsilon, subsample):
    """Compress one image."""
    try:
        sens = _load_sensitivity_if_needed(sensitivity_path, lam)
        config = _build_config(lam, beta, quality, radius, max_iters,
                               epsilon, subsample)
        img, result, quality_db = _compress_one(image, out_path, sens, config)
        if manifest_path is not None:
            write_manifest(manifest_path,
                           [_image_row(image, out_path, config, result,
                                       quality_db)])
        click.echo(f"{out_path}: {img.width}x{img.height} "
                   f"bpp={result.report.bpp:.4f} psnr={quality_db:.2f}dB "
                   f"total_bits={result.report.total_bits}")
    except Exception as exc:                      # noqa: BLE001
        _handle(exc)


@main.command()
@click.argument("images", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--beta", "beta", type=float, multiple=True,
              help="Rate weight; repeat for several rate points.")
@click.option("--beta-range", type=str, default=None,
              help="Geometric rate-point grid START:STOP:COUNT.")
@click.option("--out", "out_dir", type=str, required=True,
              help="Directory for emitted files.")
@click.option("--manifest", "manifest_path", type=str, required=True,
              help="CSV manifest path.")
@_with_shared_options
def sweep(images, beta, beta_range, out_dir, manifest_path, lam, quality,
          sensitivity_path, radius, max_iters, epsilon, subsample):
    """Compress a corpus at several rate points and record a manifest."""
    try:
        betas = _betas(beta, beta_range)
        sens = _load_sensitivity_if_needed(sensitivity_path, lam)
        os.makedirs(out_dir, exist_ok=True)
        jobs = []
        for b in betas:
            config = _build_config(lam, b, quality, radius, max_iters,
                                   epsilon, subsample)
            for path in images:
                stem = os.path.splitext(os.path.basename(path))[0]
                out_path = os.path.join(out_dir, f"{stem}_beta{b:g}.jpg")
                jobs.append((path, out_path, config))

        def run(job):
            path, out_path, config = job
            _, result, quality_db = _compress_one(path, out_path, sens,
                                                  config)
            return _image_row(path, out_path, config, result, quality_db)

        with concurrent.futures.ThreadPoolExecutor(
                max_workers=_thread_count()) as pool:
            rows = list(pool.map(run, jobs))

        rows.sort(key=lambda r: (r["beta"], r["image"]))
        aggregates = []
        for b in betas:
            group = [r for r in rows if r["beta"] == b]
            aggregates.append({
                "row_type": "aggregate", "beta": b, "lambda": lam,
                "quality": quality, "subsample": subsample,
                "bpp": float(np.mean([r["bpp"] for r in group])),
                "psnr_db": float(np.mean([r["psnr_db"] for r in group])),
                "n_images": len(group),
            })
        write_manifest(manifest_path, rows + aggregates)
        click.echo(f"{manifest_path}: {len(rows)} image rows, "
                   f"{len(aggregates)} aggregate rows")
    except Exception as exc:                      # noqa: BLE001
        _handle(exc)


@main.command()
@click.argument("original", type=click.Path(exists=True, dir_okay=False))
@click.argument("compressed", type=click.Path(exists=True, dir_okay=False))
def metrics(original, compressed):
    """Report rate and quality of an existing compressed file."""
    try:
        img = _load_rgb(original)
        with open(compressed, "rb") as fh:
            data = fh.read()
        decoded = decode_jfif(data)
        if (decoded.width, decoded.height) != (img.width, img.height):
            raise ValueError(
                f"size mismatch: original {img.width}x{img.height}, "
                f"compressed {decoded.width}x{decoded.height}")
        bits = len(data) * 8
        quality_db = psnr(img.samples, decoded.samples)
        click.echo(f"{compressed}: bpp={bits / (img.width * img.height):.4f} "
                   f"psnr={quality_db:.2f}dB total_bits={bits} "
                   f"subsample={decoded.subsample}")
    except Exception as exc:                      # noqa: BLE001
        _handle(exc)


@main.command()
@click.argument("table", type=click.Path(exists=True, dir_okay=False))
@click.option("--side", type=int, required=True,
              help="Short side of the images to be compressed.")
@click.option("--out", "out_path", type=str, required=True,
              help="Output path for the mapped table.")
def asm(table, side, out_path):
    """Map a sensitivity table to a larger compression short side."""
    try:
        sens = load_sensitivity(table)
        mapped = map_sensitivity(sens, side)
        save_sensitivity(mapped, out_path)
        click.echo(f"{out_path}: side {sens.resolution} -> {side}")
    except Exception as exc:                      # noqa: BLE001
        _handle(exc)


if __name__ == "__main__":
    main()
