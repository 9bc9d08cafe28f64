"""Region similarity (J), boundary F-measure (F) and a memory redundancy score."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from remn.errors import ArgumentError
from remn.memory import MemoryBank


def _check_sequences(pred, gt):
    pred, gt = list(pred), list(gt)
    if len(pred) != len(gt):
        raise ArgumentError(f"sequence lengths differ: {len(pred)} vs {len(gt)}")
    if not gt:
        raise ArgumentError("empty sequences")
    for p, g in zip(pred, gt):
        if np.shape(p) != np.shape(g):
            raise ArgumentError(f"mask shapes differ: {np.shape(p)} vs {np.shape(g)}")
    # frame 0 is the given annotation; a single-frame sequence is scored as is
    start = 1 if len(gt) > 1 else 0
    labels = range(1, int(max(np.max(g) for g in gt)) + 1)
    return pred[start:], gt[start:], labels


def iou(a: np.ndarray, b: np.ndarray) -> float:
    union = np.count_nonzero(a | b)
    return 1.0 if union == 0 else np.count_nonzero(a & b) / union


def metric_j(pred, gt) -> float:
    """Mean IoU over frames after the first and over object labels."""
    pred, gt, labels = _check_sequences(pred, gt)
    scores = [iou(p == k, g == k) for p, g in zip(pred, gt) for k in labels]
    return float(np.mean(scores)) if scores else 1.0


def default_tolerance(shape) -> float:
    return max(1.0, math.ceil(0.008 * math.hypot(*shape[:2])))


def boundary(mask: np.ndarray) -> np.ndarray:
    """Pixels with a 4-neighbour of a different value (image edges do not count)."""
    m = np.asarray(mask)
    b = np.zeros(m.shape, dtype=bool)
    diff_v = m[1:, :] != m[:-1, :]
    diff_h = m[:, 1:] != m[:, :-1]
    b[1:, :] |= diff_v
    b[:-1, :] |= diff_v
    b[:, 1:] |= diff_h
    b[:, :-1] |= diff_h
    return b


def boundary_f(pred: np.ndarray, gt: np.ndarray, tolerance: float) -> float:
    bp, bg = boundary(pred), boundary(gt)
    if not bp.any() and not bg.any():
        return 1.0
    if not bp.any() or not bg.any():
        return 0.0
    dist_to_gt = ndimage.distance_transform_edt(~bg)
    dist_to_pred = ndimage.distance_transform_edt(~bp)
    precision = np.mean(dist_to_gt[bp] <= tolerance)
    recall = np.mean(dist_to_pred[bg] <= tolerance)
    if precision + recall == 0:
        return 0.0
    return float(2 * precision * recall / (precision + recall))


def metric_f(pred, gt, tolerance: float | None = None) -> float:
    """Mean boundary F-measure; tolerance defaults to 0.8% of the image diagonal."""
    pred, gt, labels = _check_sequences(pred, gt)
    if tolerance is None:
        tolerance = default_tolerance(np.shape(gt[0]))
    scores = [boundary_f(p == k, g == k, tolerance) for p, g in zip(pred, gt) for k in labels]
    return float(np.mean(scores)) if scores else 1.0


def redundancy_score(bank: MemoryBank | np.ndarray) -> float | None:
    """Mean pairwise cosine similarity of spatially pooled entry keys.

    Returns None for fewer than two entries.
    """
    keys = bank.keys() if isinstance(bank, MemoryBank) else np.asarray(bank, dtype=np.float64)
    if keys.shape[0] < 2:
        return None
    pooled = keys.reshape(keys.shape[0], -1, keys.shape[-1]).mean(axis=1)
    norms = np.linalg.norm(pooled, axis=1)
    unit = pooled / np.where(norms > 0, norms, 1.0)[:, None]
    sims = unit @ unit.T
    iu = np.triu_indices(len(unit), k=1)
    return float(np.clip(sims[iu].mean(), -1.0, 1.0))
