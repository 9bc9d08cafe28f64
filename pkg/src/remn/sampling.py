"""Adaptive memory sampling from mask variation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from remn.errors import ArgumentError


@dataclass(frozen=True)
class SamplingConfig:
    sigma: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ArgumentError(f"sigma must lie in (0, 1), got {self.sigma}")


def variation_rate(m_t: np.ndarray, m_n: np.ndarray) -> float:
    """1 - IoU of two binary masks.

    Two empty masks give 0 and a single empty mask gives 1.
    """
    a = np.asarray(m_t, dtype=bool)
    b = np.asarray(m_n, dtype=bool)
    if a.shape != b.shape:
        raise ArgumentError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return 1.0 - np.count_nonzero(a & b) / union


def object_variations(m_t: np.ndarray, m_n: np.ndarray) -> dict[int, float]:
    """Variation rate per foreground label present in either mask."""
    m_t = np.asarray(m_t)
    m_n = np.asarray(m_n)
    if m_t.shape != m_n.shape:
        raise ArgumentError(f"mask shapes differ: {m_t.shape} vs {m_n.shape}")
    labels = np.union1d(np.unique(m_t), np.unique(m_n))
    return {int(k): variation_rate(m_t == k, m_n == k) for k in labels if k > 0}


def should_store(m_t: np.ndarray, m_n: np.ndarray, cfg: SamplingConfig) -> bool:
    """True when any object's variation rate exceeds sigma."""
    return any(d > cfg.sigma for d in object_variations(m_t, m_n).values())
