"""Memory bank and the non-local memory read.

One key map per stored frame is shared by all objects; values are stored per
object. The affinity is computed once per query frame and reused for every
object's readout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from remn.errors import ArgumentError, StateError


@dataclass
class BankEntry:
    key: np.ndarray             # H x W x Ck
    values: list[np.ndarray]    # K arrays of H x W x Cv
    frame_index: int


@dataclass
class MemoryBank:
    capacity: int | None = None
    entries: list[BankEntry] = field(default_factory=list)
    latest_mask: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def num_objects(self) -> int:
        return len(self.entries[0].values) if self.entries else 0

    def keys(self) -> np.ndarray:
        """Stacked keys, T x H x W x Ck."""
        if not self.entries:
            raise StateError("memory bank is empty")
        return np.stack([e.key for e in self.entries])

    def values(self, obj: int) -> np.ndarray:
        """Stacked values of one object, T x H x W x Cv."""
        if not self.entries:
            raise StateError("memory bank is empty")
        if not 0 <= obj < self.num_objects:
            raise ArgumentError(f"object {obj} out of range for {self.num_objects} objects")
        return np.stack([e.values[obj] for e in self.entries])

    def insert(self, key, values, mask, frame_index: int) -> "MemoryBank":
        return bank_insert(self, key, values, mask, frame_index)


def bank_insert(bank: MemoryBank, key, values, mask, frame_index: int) -> MemoryBank:
    """Append an entry in place and make ``mask`` the latest memory mask."""
    key = np.asarray(key, dtype=np.float64)
    values = [np.asarray(v, dtype=np.float64) for v in values]
    if key.ndim != 3:
        raise ArgumentError(f"key must be H x W x Ck, got {key.shape}")
    if not values:
        raise ArgumentError("at least one object value is required")
    if any(v.ndim != 3 or v.shape[:2] != key.shape[:2] for v in values):
        raise ArgumentError("value maps must share the key's spatial grid")
    if len({v.shape for v in values}) != 1:
        raise ArgumentError("all object values must have the same shape")
    if bank.entries:
        ref = bank.entries[0]
        if key.shape != ref.key.shape:
            raise ArgumentError(f"key shape {key.shape} differs from bank {ref.key.shape}")
        if len(values) != len(ref.values) or values[0].shape != ref.values[0].shape:
            raise ArgumentError("value shapes or object count differ from bank")
        if frame_index <= bank.entries[-1].frame_index:
            raise ArgumentError("frame indices must increase")
    bank.entries.append(BankEntry(key, values, frame_index))
    bank.latest_mask = np.asarray(mask)
    return bank


def compute_affinity(bank: MemoryBank | np.ndarray, kq: np.ndarray) -> np.ndarray:
    """Softmax over memory pixels of the negative squared L2 distance.

    Returns a (T*H*W) x (H*W) column-stochastic matrix. The query norm term
    is constant within a column and cancels in the softmax, so it is dropped.
    """
    mem = bank.keys() if isinstance(bank, MemoryBank) else np.asarray(bank, dtype=np.float64)
    kq = np.asarray(kq, dtype=np.float64)
    ck = kq.shape[-1]
    if mem.shape[-1] != ck:
        raise ArgumentError(f"key channels differ: memory {mem.shape[-1]}, query {ck}")
    km = mem.reshape(-1, ck)
    q = kq.reshape(-1, ck)
    if km.shape[0] == 0:
        raise StateError("memory bank is empty")
    logits = 2.0 * (km @ q.T) - np.sum(km * km, axis=1)[:, None]
    logits -= logits.max(axis=0, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=0, keepdims=True)
    return w


def readout(aff: np.ndarray, bank: MemoryBank, obj: int) -> np.ndarray:
    """Affinity-weighted sum of one object's memory values, H x W x Cv."""
    vm = bank.values(obj)
    h, w, cv = vm.shape[1:]
    if aff.shape != (vm.shape[0] * h * w, h * w):
        raise ArgumentError(f"affinity shape {aff.shape} does not match bank")
    return (aff.T @ vm.reshape(-1, cv)).reshape(h, w, cv)
