"""Filter-bank export: PGM/PPM images plus a JSON-lines parameter log."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .gabor import GaborBank


def _to_bytes(filt: np.ndarray) -> np.ndarray:
    """Affinely map one filter's values onto [0, 255]; constant maps to 128."""
    lo = filt.min()
    hi = filt.max()
    if hi == lo:
        return np.full(filt.shape, 128, dtype=np.uint8)
    scaled = (filt - lo) / (hi - lo) * 255.0
    return np.rint(scaled).astype(np.uint8)


def write_pgm(path: Path | str, image: np.ndarray) -> None:
    """Binary PGM (P5) from a 2-D uint8 array."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def write_ppm(path: Path | str, image: np.ndarray) -> None:
    """Binary PPM (P6) from an (H, W, 3) uint8 array."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w, c = image.shape
    if c != 3:
        raise ValueError(f"PPM needs 3 channels, got {c}")
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def export_filter_bank(out_dir: Path | str, bank: GaborBank) -> list[Path]:
    """Write one image per filter plus params.jsonl; returns written paths.

    Grayscale filters become PGM files, 3-channel filters PPM. Each filter
    is mapped to [0, 255] independently (the affine map makes pre- and
    post-standardization banks render identically).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    n_filters, in_channels = bank.raw_weights.shape[:2]
    for i in range(n_filters):
        filt = bank.raw_weights[i]
        if in_channels == 1:
            path = out_dir / f"filter_{i:03d}.pgm"
            write_pgm(path, _to_bytes(filt[0]))
        else:
            path = out_dir / f"filter_{i:03d}.ppm"
            write_ppm(path, _to_bytes(filt).transpose(1, 2, 0))
        paths.append(path)
    log_path = out_dir / "params.jsonl"
    with open(log_path, "w", encoding="utf-8") as fh:
        for i, p in enumerate(bank.params):
            fh.write(json.dumps({"filter": i, **p.to_dict()}, sort_keys=True) + "\n")
    paths.append(log_path)
    return paths


def read_params_log(path: Path | str):
    """Parse a params.jsonl written by export_filter_bank."""
    from .gabor import GaborParams

    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            d = json.loads(line)
            entries.append((d["filter"], GaborParams.from_dict(d)))
    return entries
