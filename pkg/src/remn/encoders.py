"""Deterministic toy key/value encoders and a linear mask decoder.

Both encoders work on 16 x 16 patch statistics: the patch's mean RGB
(centred on 0.5) and its centre position in [-1, 1], scaled by
``pos_weight``. Keys project these five numbers to Ck channels with a seeded
random matrix. Values additionally carry the fraction of the patch covered by
the object mask and project to Cv channels with a seeded matrix and bias.

The decoder is a single linear map Cv -> 1 per object. Its weights are the
row of the value projection's pseudo-inverse that recovers the coverage
channel, offset by -0.5, so a readout's score is positive exactly where the
memory says the patch is mostly object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from remn.config import PATCH, PipelineConfig
from remn.errors import ArgumentError
from remn.tensor import area_downsample, bilinear_upsample

N_PATCH_FEATURES = 5


def as_float_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ArgumentError(f"frame must be H0 x W0 x 3, got {frame.shape}")
    h0, w0 = frame.shape[:2]
    if h0 % PATCH or w0 % PATCH:
        raise ArgumentError(f"frame size {h0}x{w0} is not divisible by {PATCH}")
    if np.issubdtype(frame.dtype, np.integer):
        return frame.astype(np.float64) / 255.0
    return frame.astype(np.float64)


def position_grid(h: int, w: int) -> np.ndarray:
    ys = (np.arange(h) + 0.5) / h * 2.0 - 1.0
    xs = (np.arange(w) + 0.5) / w * 2.0 - 1.0
    return np.stack(np.meshgrid(ys, xs, indexing="ij"), axis=-1)


def patch_features(frame: np.ndarray, pos_weight: float) -> np.ndarray:
    """H x W x 5 patch statistics: centred mean RGB and weighted position."""
    rgb = area_downsample(as_float_frame(frame), PATCH) - 0.5
    h, w = rgb.shape[:2]
    return np.concatenate([rgb, pos_weight * position_grid(h, w)], axis=2)


def mask_coverage(mask: np.ndarray) -> np.ndarray:
    """Fraction of each 16 x 16 patch covered by a binary mask, H x W x 1."""
    return area_downsample(np.asarray(mask, dtype=bool).astype(np.float64), PATCH)[..., None]


@dataclass
class Encoders:
    key_proj: np.ndarray     # 5 x Ck
    value_proj: np.ndarray   # 6 x Cv
    value_bias: np.ndarray   # Cv
    decoder_w: np.ndarray    # Cv
    decoder_b: float
    pos_weight: float

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "Encoders":
        p = cfg.pipeline
        rng = np.random.default_rng(cfg.component_seed("encoders"))
        key_proj = rng.normal(0.0, p.key_scale / np.sqrt(p.key_channels), (N_PATCH_FEATURES, p.key_channels))
        value_proj = rng.normal(0.0, 1.0 / np.sqrt(p.value_channels), (N_PATCH_FEATURES + 1, p.value_channels))
        value_bias = rng.normal(0.0, 0.1, p.value_channels)
        if p.value_channels < N_PATCH_FEATURES + 1:
            # The coverage channel cannot be recovered exactly; fall back to a seeded read-out.
            decoder_w = rng.normal(0.0, 1.0, p.value_channels)
        else:
            decoder_w = np.linalg.pinv(value_proj)[:, -1]
        decoder_b = -float(value_bias @ decoder_w) - 0.5
        return cls(key_proj, value_proj, value_bias, decoder_w, decoder_b, p.pos_weight)


def encode_key(frame: np.ndarray, enc: Encoders) -> np.ndarray:
    return patch_features(frame, enc.pos_weight) @ enc.key_proj


def encode_value(frame: np.ndarray, object_mask: np.ndarray, enc: Encoders) -> np.ndarray:
    frame = as_float_frame(frame)
    object_mask = np.asarray(object_mask)
    if object_mask.shape != frame.shape[:2]:
        raise ArgumentError(f"mask shape {object_mask.shape} does not match frame {frame.shape[:2]}")
    features = np.concatenate([patch_features(frame, enc.pos_weight), mask_coverage(object_mask)], axis=2)
    return features @ enc.value_proj + enc.value_bias


def object_scores(readouts: list[np.ndarray], enc: Encoders) -> np.ndarray:
    """Low-resolution per-object scores, H x W x K."""
    return np.stack([r @ enc.decoder_w + enc.decoder_b for r in readouts], axis=-1)


def scores_to_labels(scores: np.ndarray, factor: int = PATCH) -> np.ndarray:
    """Upsample H x W x K scores and take the per-pixel argmax against a zero background.

    Ties go to the background.
    """
    up = bilinear_upsample(scores, factor)
    full = np.concatenate([np.zeros(up.shape[:2] + (1,)), up], axis=2)
    return np.argmax(full, axis=2).astype(np.uint8)


def decode_mask(readouts: list[np.ndarray], enc: Encoders) -> np.ndarray:
    if not readouts:
        raise ArgumentError("at least one object readout is required")
    return scores_to_labels(object_scores(readouts, enc))
