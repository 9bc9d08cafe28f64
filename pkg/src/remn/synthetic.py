"""Synthetic moving-square videos with pixel-exact ground truth.

Scenarios:

* ``plain``: one red square drifting over a textured green/blue background
  along a closed path, so the clip loops seamlessly.
* ``distractor``: the annotated square in the left half and an identically
  coloured, unannotated square in the right half. Each keeps up to one
  patch of clearance from the midline, so they never overlap and, at
  acceptance sizes, the distractor stays outside the foreground prior.
* ``deform``: a square near the centre whose side length oscillates.
* ``long``: the ``plain`` sequence played ``replay_factor`` times in a row.
"""

from __future__ import annotations

import numpy as np

from remn.config import PATCH, ScenarioSpec
from remn.errors import ArgumentError
from remn.tensor import bilinear_upsample

OBJECT_COLOR = np.array([230, 50, 40], dtype=np.float64)
MAX_SPEED = 1.2  # pixels per frame


def textured_background(h0: int, w0: int, rng: np.random.Generator) -> np.ndarray:
    coarse = np.empty((5, 5, 3))
    coarse[..., 0] = rng.uniform(20, 80, (5, 5))
    coarse[..., 1] = rng.uniform(80, 180, (5, 5))
    coarse[..., 2] = rng.uniform(80, 200, (5, 5))
    factor = int(np.ceil(max(h0, w0) / 5))
    smooth = bilinear_upsample(coarse, factor)[:h0, :w0]
    noise = rng.normal(0.0, 8.0, (h0, w0, 3))
    return np.clip(smooth + noise, 0, 255)


def _oscillation(n: int, lo: float, hi: float, rng: np.random.Generator, periodic: bool = False) -> np.ndarray:
    """Smooth sinusoidal track inside [lo, hi] with speed at most MAX_SPEED.

    A periodic track completes a whole number of cycles in n frames, so the
    clip loops without a jump; its amplitude shrinks if needed to respect the
    speed limit.
    """
    amp = (hi - lo) / 2.0
    phase = rng.uniform(0, 2 * np.pi)
    if amp <= 0:
        return np.full(n, lo)
    if periodic:
        cycles = max(1, int(n * MAX_SPEED / (2 * np.pi * amp)))
        period = n / cycles
        amp = min(amp, MAX_SPEED * period / (2 * np.pi))
    else:
        period = 2 * np.pi * amp / MAX_SPEED * rng.uniform(1.0, 1.5)
    mid = (lo + hi) / 2.0
    return mid + amp * np.sin(2 * np.pi * np.arange(n) / period + phase)


def _paint(frame, mask, top, left, side, label):
    t, l = int(round(top)), int(round(left))
    frame[t:t + side, l:l + side] = OBJECT_COLOR
    if label:
        mask[t:t + side, l:l + side] = label


def _plain(spec: ScenarioSpec, rng):
    h0, w0 = spec.size
    side = max(4, int(0.3 * min(h0, w0)))
    bg = textured_background(h0, w0, rng)
    tops = _oscillation(spec.frames, 0, h0 - side, rng, periodic=True)
    lefts = _oscillation(spec.frames, 0, w0 - side, rng, periodic=True)
    frames, masks = [], []
    for t in range(spec.frames):
        f, m = bg.copy(), np.zeros((h0, w0), np.uint8)
        _paint(f, m, tops[t], lefts[t], side, 1)
        frames.append(f.astype(np.uint8))
        masks.append(m)
    return frames, masks


def _distractor(spec: ScenarioSpec, rng):
    h0, w0 = spec.size
    half = w0 // 2
    side = max(4, int(0.55 * min(h0, half)))
    bg = textured_background(h0, w0, rng)
    # one patch of clearance on each side of the midline keeps the distractor
    # outside the dilated foreground prior of the annotated square
    margin = max(0, min(PATCH, (half - side - 1) // 2))
    tracks = []
    for x0 in (0, half):
        tops = _oscillation(spec.frames, 0, h0 - side, rng)
        lefts = _oscillation(spec.frames, x0 + margin, x0 + half - side - margin, rng)
        tracks.append((tops, lefts))
    frames, masks = [], []
    for t in range(spec.frames):
        f, m = bg.copy(), np.zeros((h0, w0), np.uint8)
        for label, (tops, lefts) in zip((1, 0), tracks):
            _paint(f, m, tops[t], lefts[t], side, label)
        frames.append(f.astype(np.uint8))
        masks.append(m)
    return frames, masks


def _deform(spec: ScenarioSpec, rng):
    h0, w0 = spec.size
    short = min(h0, w0)
    lo, hi = max(4, int(0.2 * short)), max(5, int(0.5 * short))
    bg = textured_background(h0, w0, rng)
    sides = np.rint(_oscillation(spec.frames, lo, hi, rng)).astype(int)
    frames, masks = [], []
    for t in range(spec.frames):
        f, m = bg.copy(), np.zeros((h0, w0), np.uint8)
        side = sides[t]
        _paint(f, m, (h0 - side) / 2, (w0 - side) / 2, side, 1)
        frames.append(f.astype(np.uint8))
        masks.append(m)
    return frames, masks


def generate_synthetic_video(spec: ScenarioSpec) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Frames (H0 x W0 x 3 uint8) and label masks (H0 x W0 uint8) for a scenario."""
    if not isinstance(spec, ScenarioSpec):
        raise ArgumentError("spec must be a ScenarioSpec")
    rng = np.random.default_rng(spec.seed)
    if spec.name == "plain":
        return _plain(spec, rng)
    if spec.name == "distractor":
        return _distractor(spec, rng)
    if spec.name == "deform":
        return _deform(spec, rng)
    frames, masks = _plain(spec, rng)
    return frames * spec.replay_factor, masks * spec.replay_factor
