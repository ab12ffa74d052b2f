"""CSV manifest for compression runs.

The manifest is the machine-readable record of a run: one row per emitted
file plus one aggregate row per setting group. The first line is a comment
tag identifying the schema; everything below is plain CSV. Rows carry no
timestamps so identical runs produce identical files.
"""

from __future__ import annotations

import csv
import io
import os

from .model import HmojpegError

MANIFEST_TAG = "hmojpeg-manifest/1"

COLUMNS = (
    "row_type",        # "image" or "aggregate"
    "image",           # source path (empty on aggregate rows)
    "out_path",        # emitted file (empty on aggregate rows)
    "beta",
    "lambda",
    "quality",
    "subsample",
    "width",
    "height",
    "total_bits",
    "entropy_bits",
    "ideal_bits",
    "bpp",
    "psnr_db",
    "n_images",        # aggregate rows only
)


class ManifestFormatError(HmojpegError):
    """The manifest file is missing the tag line or has a bad schema."""


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(path: str, rows: list[dict]) -> None:
    """Write rows atomically; every row must only use known columns."""
    for row in rows:
        unknown = set(row) - set(COLUMNS)
        if unknown:
            raise ManifestFormatError(
                f"unknown manifest columns {sorted(unknown)}")
        if row.get("row_type") not in ("image", "aggregate"):
            raise ManifestFormatError(
                f"row_type must be 'image' or 'aggregate', "
                f"got {row.get('row_type')!r}")
    buffer = io.StringIO()
    buffer.write(f"# {MANIFEST_TAG}\n")
    writer = csv.DictWriter(buffer, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _format_value(row.get(c)) for c in COLUMNS})
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(buffer.getvalue())
    os.replace(tmp, path)


def read_manifest(path: str) -> list[dict]:
    """Read rows back; numeric fields are converted, empty fields dropped."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            first = fh.readline().strip()
            if first != f"# {MANIFEST_TAG}":
                raise ManifestFormatError(
                    f"{path}: first line {first!r} is not '# {MANIFEST_TAG}'")
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or tuple(reader.fieldnames) != COLUMNS:
                raise ManifestFormatError(
                    f"{path}: header {reader.fieldnames} does not match the "
                    f"schema")
            raw_rows = list(reader)
    except OSError as exc:
        raise ManifestFormatError(f"cannot read {path}: {exc}") from exc

    int_cols = {"quality", "width", "height", "total_bits", "entropy_bits",
                "n_images"}
    float_cols = {"beta", "lambda", "ideal_bits", "bpp", "psnr_db"}
    rows = []
    for raw in raw_rows:
        row = {}
        for key, value in raw.items():
            if value == "" or value is None:
                continue
            if key in int_cols:
                row[key] = int(value)
            elif key in float_cols:
                row[key] = float(value)
            else:
                row[key] = value
        rows.append(row)
    return rows
