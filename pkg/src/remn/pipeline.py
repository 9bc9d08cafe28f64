"""Frame-by-frame segmentation loop.

Per query frame: encode the key, reinforce it with the previous predicted
mask, read the memory, decode a mask, decide whether to store the frame, and
compress the bank once it is full.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from remn.config import PATCH, PipelineConfig
from remn.encoders import Encoders, decode_mask, encode_key, encode_value
from remn.errors import ArgumentError
from remn.foreground import FrmParams, reinforce
from remn.memory import MemoryBank, compute_affinity, readout
from remn.redundancy import CompressorParams, GateParams, compress, gate_probabilities, rrm_loss, select_policy
from remn.sampling import SamplingConfig, should_store
from remn.tensor import resize_mask_nearest


@dataclass
class CompressionEvent:
    frame_index: int
    policy: int
    prob: np.ndarray
    length_before: int
    length_after: int
    loss: float


@dataclass
class FrameResult:
    mask: np.ndarray
    stored: bool
    policy_applied: int | None
    latency: float
    bank_size: int          # occupancy after any insertion, before compression
    compression: CompressionEvent | None = None


class Segmenter:
    """Holds the parameters and the memory bank for one video."""

    def __init__(self, cfg: PipelineConfig, num_objects: int):
        if num_objects < 1:
            raise ArgumentError("at least one annotated object is required")
        self.cfg = cfg
        self.num_objects = num_objects
        self.encoders = Encoders.from_config(cfg)
        ck = cfg.pipeline.key_channels
        kh, kw = cfg.frm.extents
        self.frm = FrmParams.random(ck, kh, kw, seed=cfg.component_seed("frm"), center_bias=cfg.frm.center_bias)
        self.gate = GateParams.random(ck, cfg.rrm.hidden, cfg.rrm.policies, seed=cfg.component_seed("rrm"))
        self.compressor = CompressorParams.averaging(cfg.rrm.policies)
        self.sampling = SamplingConfig(cfg.asm.sigma)
        self.bank = MemoryBank(capacity=cfg.rrm.capacity if cfg.rrm.enabled else None)
        self.prev_mask: np.ndarray | None = None
        self.t = 0

    def foreground_prior(self, prev_mask: np.ndarray, h: int, w: int) -> np.ndarray:
        """Union foreground of the previous mask at key resolution, H x W x 1.

        With ``frm.dilate`` the prior is grown by the attention window so that
        pixels the object can reach within one frame are not damped.
        """
        m = (resize_mask_nearest(prev_mask, h, w) > 0).astype(np.float64)
        if self.cfg.frm.dilate:
            m = ndimage.maximum_filter(m, size=(self.frm.kh, self.frm.kw, 1), mode="constant", cval=0.0)
        return m

    def query_key(self, frame: np.ndarray, prev_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Raw and (optionally) reinforced key for a frame."""
        raw = encode_key(frame, self.encoders)
        if not self.cfg.frm.enabled:
            return raw, raw
        m = self.foreground_prior(prev_mask, *raw.shape[:2])
        return raw, reinforce(raw, m, self.frm)

    def _store(self, frame, mask, raw_key, key) -> None:
        values = [encode_value(frame, mask == k + 1, self.encoders) for k in range(self.num_objects)]
        stored_key = raw_key if self.cfg.pipeline.store_raw_key else key
        self.bank.insert(stored_key, values, mask, self.t)

    def _maybe_compress(self) -> CompressionEvent | None:
        r = self.cfg.rrm
        if not r.enabled:
            return None
        body = len(self.bank) - (1 if r.protect_first else 0)
        if body < r.capacity:
            return None
        keys = self.bank.keys()
        if r.protect_first:
            keys = keys[1:]
        prob = gate_probabilities(keys, self.gate)
        policy = select_policy(prob)
        before = self.bank
        self.bank = compress(before, policy, self.compressor, protect_first=r.protect_first)
        return CompressionEvent(self.t, policy, prob, len(before), len(self.bank), rrm_loss(before, self.bank))

    def start(self, frame: np.ndarray, mask: np.ndarray) -> FrameResult:
        mask = np.asarray(mask)
        if mask.shape != np.shape(frame)[:2]:
            raise ArgumentError(f"first mask {mask.shape} does not match frame {np.shape(frame)[:2]}")
        if mask.min() < 0 or mask.max() > self.num_objects:
            raise ArgumentError(f"mask labels must lie in [0, {self.num_objects}]")
        tic = time.perf_counter()
        self.t = 0
        self.bank = MemoryBank(capacity=self.bank.capacity)
        raw, key = self.query_key(frame, mask)
        self._store(frame, mask, raw, key)
        self.prev_mask = mask
        return FrameResult(mask, True, None, time.perf_counter() - tic, len(self.bank))

    def step(self, frame: np.ndarray) -> FrameResult:
        if self.prev_mask is None:
            raise ArgumentError("call start() with the annotated first frame before step()")
        tic = time.perf_counter()
        self.t += 1
        raw, key = self.query_key(frame, self.prev_mask)
        aff = compute_affinity(self.bank, key)
        readouts = [readout(aff, self.bank, k) for k in range(self.num_objects)]
        mask = decode_mask(readouts, self.encoders)

        if self.cfg.asm.enabled:
            store = should_store(mask, self.bank.latest_mask, self.sampling)
        else:
            store = self.t % self.cfg.asm.interval == 0
        event = None
        if store:
            self._store(frame, mask, raw, key)
        size = len(self.bank)
        if store:
            event = self._maybe_compress()
        self.prev_mask = mask
        return FrameResult(mask, store, event.policy if event else None,
                           time.perf_counter() - tic, size, event)


def num_objects_in(mask: np.ndarray) -> int:
    return int(np.max(mask)) if np.size(mask) else 0


def segment_video(frames, first_mask: np.ndarray, cfg: PipelineConfig,
                  num_objects: int | None = None) -> list[FrameResult]:
    """Segment every frame given the annotation of the first one."""
    frames = list(frames)
    if not frames:
        raise ArgumentError("at least one frame is required")
    h0, w0 = np.shape(frames[0])[:2]
    if h0 % PATCH or w0 % PATCH:
        raise ArgumentError(f"frame size {h0}x{w0} is not divisible by {PATCH}")
    seg = Segmenter(cfg, num_objects or num_objects_in(first_mask))
    results = [seg.start(frames[0], first_mask)]
    results.extend(seg.step(f) for f in frames[1:])
    return results


__all__ = ["CompressionEvent", "FrameResult", "Segmenter", "segment_video"]
