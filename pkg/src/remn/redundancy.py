"""Redundancy reduction for a full memory bank.

A soft modulation gate maps the pooled memory keys to a probability per
temporal policy; the argmax policy ``s`` selects a temporal stride of
``2 ** (s + 1)``, and consecutive windows of that many entries are merged by a
per-channel temporal kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from remn.errors import ArgumentError, StateError
from remn.memory import BankEntry, MemoryBank
from remn.tensor import global_average_pool, kl_divergence, softmax_axis

BN_EPS = 1e-5
_BELOW_ONE = np.nextafter(1.0, 0.0)


def omega(z):
    """max(0, tanh(z)); maps onto [0, 1).

    tanh rounds to exactly 1 for z > ~19 in float64, so the result is capped
    at the largest double below 1.
    """
    return np.minimum(np.maximum(0.0, np.tanh(z)), _BELOW_ONE)


@dataclass
class GateParams:
    lambda_w: np.ndarray   # Cm x Ck
    lambda_b: np.ndarray   # Cm
    bn_scale: np.ndarray   # Cm
    bn_shift: np.ndarray   # Cm
    beta_w: np.ndarray     # St x Cm
    beta_b: np.ndarray     # St
    gamma: float = 0.0
    bn_mean: np.ndarray | None = None
    bn_var: np.ndarray | None = None

    def __post_init__(self):
        cm = self.lambda_w.shape[0]
        if self.bn_mean is None:
            self.bn_mean = np.zeros(cm)
        if self.bn_var is None:
            self.bn_var = np.ones(cm)
        if self.beta_w.ndim != 2 or self.beta_w.shape[1] != cm or self.beta_w.shape[0] < 1:
            raise ArgumentError(f"beta weight shape {self.beta_w.shape} incompatible with hidden width {cm}")

    @property
    def num_policies(self) -> int:
        return self.beta_w.shape[0]

    TRAINABLE = ("lambda_w", "lambda_b", "bn_scale", "bn_shift", "beta_w", "beta_b", "gamma")

    @classmethod
    def random(cls, key_channels: int, hidden: int = 8, policies: int = 2, seed: int = 0) -> "GateParams":
        rng = np.random.default_rng(seed)
        return cls(
            lambda_w=rng.normal(0.0, 1.0 / np.sqrt(key_channels), (hidden, key_channels)),
            lambda_b=rng.normal(0.0, 0.1, hidden),
            bn_scale=1.0 + rng.normal(0.0, 0.1, hidden),
            bn_shift=rng.normal(0.0, 0.1, hidden),
            beta_w=rng.normal(0.0, 1.0 / np.sqrt(hidden), (policies, hidden)),
            beta_b=rng.normal(0.0, 0.1, policies),
            gamma=0.0,
        )

    @classmethod
    def zeros(cls, key_channels: int, hidden: int = 8, policies: int = 2, gamma: float = 0.0) -> "GateParams":
        return cls(np.zeros((hidden, key_channels)), np.zeros(hidden), np.ones(hidden), np.zeros(hidden),
                   np.zeros((policies, hidden)), np.zeros(policies), gamma)


def _gate_forward(k_m: np.ndarray, params: GateParams) -> dict:
    k_m = np.asarray(k_m, dtype=np.float64)
    if k_m.ndim != 4 or k_m.shape[0] < 1:
        raise ArgumentError(f"memory keys must be T x H x W x Ck with T >= 1, got {k_m.shape}")
    if k_m.shape[3] != params.lambda_w.shape[1]:
        raise ArgumentError(f"gate expects {params.lambda_w.shape[1]} key channels, got {k_m.shape[3]}")
    pooled = global_average_pool(k_m).mean(axis=(0, 1, 2))
    hidden = params.lambda_w @ pooled + params.lambda_b
    inv_std = 1.0 / np.sqrt(params.bn_var + BN_EPS)
    normed = (hidden - params.bn_mean) * inv_std
    bn = normed * params.bn_scale + params.bn_shift
    act = np.maximum(0.0, bn)
    z = params.beta_w @ act + params.beta_b + params.gamma
    return dict(pooled=pooled, normed=normed, inv_std=inv_std, bn=bn, act=act, z=z, prob=omega(z))


def gate_probabilities(k_m: np.ndarray, params: GateParams) -> np.ndarray:
    return _gate_forward(k_m, params)["prob"]


def gate_gradient(k_m: np.ndarray, params: GateParams) -> dict[str, np.ndarray | float]:
    """Gradient of sum(Prob) with respect to every trainable gate parameter."""
    f = _gate_forward(k_m, params)
    # omega' = 1 - tanh^2 where tanh > 0, else 0
    d_z = np.where(f["z"] > 0, 1.0 - np.tanh(f["z"]) ** 2, 0.0)
    d_act = params.beta_w.T @ d_z
    d_bn = d_act * (f["bn"] > 0)
    d_hidden = d_bn * params.bn_scale * f["inv_std"]
    return {
        "lambda_w": np.outer(d_hidden, f["pooled"]),
        "lambda_b": d_hidden,
        "bn_scale": d_bn * f["normed"],
        "bn_shift": d_bn,
        "beta_w": np.outer(d_z, f["act"]),
        "beta_b": d_z,
        "gamma": float(d_z.sum()),
    }


def gate_kink_distance(k_m: np.ndarray, params: GateParams) -> float:
    """Smallest distance of any ReLU or omega input from its kink at 0."""
    f = _gate_forward(k_m, params)
    return float(min(np.abs(f["bn"]).min(), np.abs(f["z"]).min()))


def select_policy(prob) -> int:
    """Index of the largest probability; ties go to the smallest index."""
    prob = np.asarray(prob, dtype=np.float64)
    if prob.ndim != 1 or prob.size < 1:
        raise ArgumentError("probability vector must be 1-D and non-empty")
    return int(np.argmax(prob))


def policy_stride(policy: int) -> int:
    return 2 ** (policy + 1)


@dataclass
class CompressorParams:
    kernels: list[np.ndarray]   # kernels[s] has length 2 ** (s + 1)

    @classmethod
    def averaging(cls, policies: int) -> "CompressorParams":
        return cls([np.full(policy_stride(s), 1.0 / policy_stride(s)) for s in range(policies)])


def compress(bank: MemoryBank, policy: int, comp: CompressorParams, protect_first: bool = False) -> MemoryBank:
    """Merge consecutive windows of ``2 ** (policy + 1)`` entries into one.

    Keys and every object's values go through the same temporal kernel. With
    ``protect_first`` the oldest entry is carried over untouched and only the
    remaining entries are windowed.
    """
    if not 0 <= policy < len(comp.kernels):
        raise ArgumentError(f"policy {policy} out of range for {len(comp.kernels)} kernels")
    stride = policy_stride(policy)
    kernel = np.asarray(comp.kernels[policy], dtype=np.float64)
    if kernel.shape != (stride,):
        raise ArgumentError(f"kernel for policy {policy} must have length {stride}")
    head = bank.entries[:1] if protect_first else []
    body = bank.entries[len(head):]
    if not body or len(body) % stride:
        raise StateError(f"cannot compress {len(body)} entries with temporal stride {stride}")

    keys = np.stack([e.key for e in body])
    values = [np.stack([e.values[k] for e in body]) for k in range(len(body[0].values))]
    merged = []
    for start in range(0, len(body), stride):
        window = slice(start, start + stride)
        key = np.tensordot(kernel, keys[window], axes=1)
        vals = [np.tensordot(kernel, v[window], axes=1) for v in values]
        merged.append(BankEntry(key, vals, body[start + stride - 1].frame_index))
    return MemoryBank(capacity=bank.capacity, entries=list(head) + merged, latest_mask=bank.latest_mask)


def _channel_distribution(x: np.ndarray) -> np.ndarray:
    return softmax_axis(x.reshape(-1, x.shape[-1]).mean(axis=0))


def rrm_loss(before: MemoryBank, after: MemoryBank) -> float:
    """KL drift between a bank and its compressed version.

    Keys and values are pooled over time and space and turned into a
    distribution over channels by softmax; the value term is averaged over
    objects.
    """
    kb, ka = before.keys(), after.keys()
    if kb.shape[-1] != ka.shape[-1]:
        raise ArgumentError("key channel counts differ")
    loss = kl_divergence(_channel_distribution(kb), _channel_distribution(ka))
    if before.num_objects != after.num_objects:
        raise ArgumentError("object counts differ")
    value_terms = []
    for k in range(before.num_objects):
        vb, va = before.values(k), after.values(k)
        if vb.shape[-1] != va.shape[-1]:
            raise ArgumentError("value channel counts differ")
        value_terms.append(kl_divergence(_channel_distribution(vb), _channel_distribution(va)))
    return loss + float(np.mean(value_terms))
