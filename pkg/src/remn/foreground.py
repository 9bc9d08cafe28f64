"""Foreground reinforcement of the query key.

A small convolutional head looks at the query key concatenated with the
previous frame's (downsampled) mask and produces, for every pixel, softmax
weights over its kh x kw neighbourhood. The weights are scaled by
``mask_gate(m)`` so pixels outside the previous mask are damped by up to 1/e,
and the enhanced key is the weighted sum over each pixel's own neighbourhood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from remn.errors import ArgumentError
from remn.tensor import conv2d, local_patches, softmax_axis


@dataclass
class FrmParams:
    kh: int
    kw: int
    local_kernel: np.ndarray   # kh x kw x (Ck + 1) x Ck
    local_bias: np.ndarray     # Ck
    logit_kernel: np.ndarray   # 1 x 1 x Ck x Z
    logit_bias: np.ndarray     # Z

    def __post_init__(self):
        if self.kh < 1 or self.kw < 1 or self.kh % 2 == 0 or self.kw % 2 == 0:
            raise ArgumentError(f"kernel extents must be odd and >= 1, got {self.kh}x{self.kw}")
        ck = self.local_kernel.shape[3]
        if self.local_kernel.shape != (self.kh, self.kw, ck + 1, ck):
            raise ArgumentError(f"bad local kernel shape {self.local_kernel.shape}")
        if self.logit_kernel.shape != (1, 1, ck, self.taps):
            raise ArgumentError(f"bad logit kernel shape {self.logit_kernel.shape}")

    @property
    def taps(self) -> int:
        return self.kh * self.kw

    @property
    def key_channels(self) -> int:
        return self.local_kernel.shape[3]

    @classmethod
    def random(cls, key_channels: int, kh: int = 3, kw: int = 3, seed: int = 0,
               center_bias: float = 4.0, scale: float = 0.1) -> "FrmParams":
        """Seeded random init; ``center_bias`` is added to the logit of the centre tap."""
        rng = np.random.default_rng(seed)
        z = kh * kw
        fan_local = kh * kw * (key_channels + 1)
        local_kernel = rng.normal(0.0, 1.0 / np.sqrt(fan_local), (kh, kw, key_channels + 1, key_channels))
        local_bias = np.zeros(key_channels)
        logit_kernel = rng.normal(0.0, scale / np.sqrt(key_channels), (1, 1, key_channels, z))
        logit_bias = np.zeros(z)
        logit_bias[z // 2] = center_bias
        return cls(kh, kw, local_kernel, local_bias, logit_kernel, logit_bias)


def mask_gate(m):
    """exp(m) / e: 1 on the foreground, 1/e on the background."""
    return np.exp(np.asarray(m, dtype=np.float64) - 1.0)


def attention_logits(kq: np.ndarray, m_prev: np.ndarray, params: FrmParams) -> np.ndarray:
    features = np.concatenate([kq, m_prev], axis=2)
    local = conv2d(features, params.local_kernel, params.local_bias)
    return conv2d(local, params.logit_kernel, params.logit_bias)


def attention_weights(kq: np.ndarray, m_prev: np.ndarray, params: FrmParams) -> np.ndarray:
    """Mask-gated local attention field of shape H x W x Z."""
    kq = np.asarray(kq, dtype=np.float64)
    m_prev = np.asarray(m_prev, dtype=np.float64)
    if kq.ndim != 3 or kq.shape[2] != params.key_channels:
        raise ArgumentError(f"key of shape {kq.shape} does not match {params.key_channels} channels")
    if m_prev.shape != kq.shape[:2] + (1,):
        raise ArgumentError(f"mask shape {m_prev.shape} does not match key grid {kq.shape[:2]}")
    alpha = softmax_axis(attention_logits(kq, m_prev, params), axis=2)
    return alpha * mask_gate(m_prev)


def enhance(kq: np.ndarray, alpha: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Aggregate each pixel's zero-padded kh x kw neighbourhood with its weights."""
    kq = np.asarray(kq, dtype=np.float64)
    if alpha.shape != kq.shape[:2] + (kh * kw,):
        raise ArgumentError(f"attention field {alpha.shape} does not match key {kq.shape} and {kh}x{kw} kernel")
    patches = local_patches(kq, kh, kw)
    return np.einsum("hwp,hwpc->hwc", alpha, patches)


def reinforce(kq: np.ndarray, m_prev: np.ndarray, params: FrmParams) -> np.ndarray:
    alpha = attention_weights(kq, m_prev, params)
    return enhance(kq, alpha, params.kh, params.kw)
