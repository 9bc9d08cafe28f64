"""Binary PPM (P6) frames and PGM (P5) label masks, 8 bits per sample."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from remn.errors import ArgumentError

_HEADER = re.compile(rb"^(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def write_ppm(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ArgumentError(f"PPM needs H x W x 3, got {image.shape}")
    h, w = image.shape[:2]
    Path(path).write_bytes(b"P6\n%d %d\n255\n" % (w, h) + image.astype(np.uint8).tobytes())


def write_pgm(path, mask: np.ndarray) -> None:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ArgumentError(f"PGM needs H x W, got {mask.shape}")
    if mask.min(initial=0) < 0 or mask.max(initial=0) > 255:
        raise ArgumentError("PGM labels must fit in 8 bits")
    h, w = mask.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + mask.astype(np.uint8).tobytes())


def read_pnm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = _HEADER.match(data)
    if not m:
        raise ArgumentError(f"{path}: not a binary PPM/PGM file")
    magic, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if maxval > 255:
        raise ArgumentError(f"{path}: only 8-bit samples are supported")
    channels = 3 if magic == b"P6" else 1
    body = data[m.end():]
    if len(body) < w * h * channels:
        raise ArgumentError(f"{path}: truncated pixel data")
    pixels = np.frombuffer(body[:w * h * channels], dtype=np.uint8)
    return pixels.reshape(h, w, 3) if channels == 3 else pixels.reshape(h, w)


def frame_name(index: int, ext: str) -> str:
    return f"{index:06d}.{ext}"


def write_sequence(directory, frames=None, masks=None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(frames or []):
        write_ppm(directory / frame_name(i, "ppm"), f)
    for i, m in enumerate(masks or []):
        write_pgm(directory / frame_name(i, "pgm"), m)


def read_sequence(directory, ext: str) -> list[np.ndarray]:
    paths = sorted(Path(directory).glob(f"[0-9]*.{ext}"))
    if not paths:
        raise ArgumentError(f"no .{ext} files in {directory}")
    return [read_pnm(p) for p in paths]
