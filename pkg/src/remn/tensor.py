"""Dense float64 kernels used by the rest of the package.

Arrays are plain numpy arrays in channels-last layout (H x W x C, or
T x H x W x C for stacks of frames).
"""

from __future__ import annotations

import numpy as np

from remn.errors import ArgumentError

KL_EPS = 1e-12


def softmax_axis(x: np.ndarray, axis: int = -1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if not -x.ndim <= axis < x.ndim:
        raise ArgumentError(f"axis {axis} out of range for rank {x.ndim}")
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) for probability vectors, with both sides floored by 1e-12."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ArgumentError(f"shape mismatch: {p.shape} vs {q.shape}")
    return float(np.sum(p * np.log((p + KL_EPS) / (q + KL_EPS))))


def conv2d(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray | None = None) -> np.ndarray:
    """Stride-1 "same" cross-correlation with zero padding.

    x is H x W x Cin, kernel is kh x kw x Cin x Cout with odd kh, kw.
    """
    x = np.asarray(x, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if x.ndim != 3 or kernel.ndim != 4:
        raise ArgumentError("conv2d expects x of rank 3 and kernel of rank 4")
    kh, kw, cin, cout = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ArgumentError(f"kernel extents must be odd, got {kh}x{kw}")
    if x.shape[2] != cin:
        raise ArgumentError(f"channel mismatch: input has {x.shape[2]}, kernel expects {cin}")
    h, w, _ = x.shape
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x, ((ph, ph), (pw, pw), (0, 0)))
    out = np.zeros((h, w, cout))
    for dy in range(kh):
        for dx in range(kw):
            out += padded[dy:dy + h, dx:dx + w, :] @ kernel[dy, dx]
    if bias is not None:
        bias = np.asarray(bias, dtype=np.float64)
        if bias.shape != (cout,):
            raise ArgumentError(f"bias must have shape ({cout},), got {bias.shape}")
        out += bias
    return out


def local_patches(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Zero-padded kh x kw neighbourhoods of every pixel.

    Returns an H x W x (kh*kw) x C array; tap p = dy * kw + dx is the
    neighbour at offset (dy - kh//2, dx - kw//2).
    """
    h, w, c = x.shape
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x, ((ph, ph), (pw, pw), (0, 0)))
    out = np.empty((h, w, kh * kw, c))
    for dy in range(kh):
        for dx in range(kw):
            out[:, :, dy * kw + dx, :] = padded[dy:dy + h, dx:dx + w, :]
    return out


def global_average_pool(x: np.ndarray) -> np.ndarray:
    """Mean over the spatial grid of a T x H x W x C stack, keeping T x 1 x 1 x C."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[1] < 1 or x.shape[2] < 1:
        raise ArgumentError(f"expected a non-empty T x H x W x C array, got shape {x.shape}")
    return x.mean(axis=(1, 2), keepdims=True)


def _sample_centres(src: int, dst: int) -> np.ndarray:
    return np.floor((np.arange(dst) + 0.5) * src / dst).astype(np.intp)


def resize_mask_nearest(mask: np.ndarray, h: int, w: int) -> np.ndarray:
    """Nearest-neighbour downsampling of a label mask.

    Output pixel (i, j) takes the label at input row floor((i + 0.5) * H0 / h)
    and column floor((j + 0.5) * W0 / w), so a 16 x 16 block maps to its
    pixel (8, 8).
    """
    mask = np.asarray(mask)
    if h < 1 or w < 1:
        raise ArgumentError("target extent must be positive")
    h0, w0 = mask.shape[:2]
    if h0 < h or w0 < w:
        raise ArgumentError(f"cannot downsample {h0}x{w0} to larger {h}x{w}")
    rows = _sample_centres(h0, h)
    cols = _sample_centres(w0, w)
    return mask[np.ix_(rows, cols)].reshape(h, w, 1)


def area_downsample(x: np.ndarray, factor: int) -> np.ndarray:
    """Mean over non-overlapping factor x factor blocks of an H0 x W0 [x C] array."""
    x = np.asarray(x, dtype=np.float64)
    h0, w0 = x.shape[:2]
    if h0 % factor or w0 % factor:
        raise ArgumentError(f"{h0}x{w0} is not divisible by {factor}")
    rest = x.shape[2:]
    blocks = x.reshape(h0 // factor, factor, w0 // factor, factor, *rest)
    return blocks.mean(axis=(1, 3))


def _bilinear_taps(n: int, factor: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src = (np.arange(n * factor) + 0.5) / factor - 0.5
    src = np.clip(src, 0.0, n - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n - 1)
    return lo, hi, src - lo


def bilinear_upsample(x: np.ndarray, factor: int) -> np.ndarray:
    """Bilinear upsampling of an H x W x C array by an integer factor (align_corners=False)."""
    x = np.asarray(x, dtype=np.float64)
    if factor < 1:
        raise ArgumentError("factor must be >= 1")
    if x.ndim != 3:
        raise ArgumentError(f"expected H x W x C, got shape {x.shape}")
    if factor == 1:
        return x.copy()
    h, w, _ = x.shape
    y0, y1, fy = _bilinear_taps(h, factor)
    x0, x1, fx = _bilinear_taps(w, factor)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = x[y0][:, x0] * (1 - fx) + x[y0][:, x1] * fx
    bottom = x[y1][:, x0] * (1 - fx) + x[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy
