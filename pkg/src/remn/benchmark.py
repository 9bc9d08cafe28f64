"""Benchmark runner: synthesize a scenario, segment it, and summarise accuracy and speed."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from remn.config import PipelineConfig, ScenarioSpec, to_flat
from remn.errors import ArgumentError
from remn.metrics import metric_f, metric_j, redundancy_score
from remn.pipeline import FrameResult, Segmenter, num_objects_in
from remn.synthetic import generate_synthetic_video

VOLATILE_FIELDS = ("fps", "per_frame_latency")


@dataclass
class BenchmarkReport:
    j_mean: float
    f_mean: float
    jf_mean: float
    fps: float
    peak_bank: int
    redundancy: float | None
    per_frame_latency: list[float]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "frame", "latency", "j_mean", "f_mean", "jf_mean", "fps", "peak_bank", "redundancy"])
        for i, lat in enumerate(self.per_frame_latency):
            writer.writerow(["frame", i, repr(lat), "", "", "", "", "", ""])
        writer.writerow(["summary", "", "", self.j_mean, self.f_mean, self.jf_mean, self.fps, self.peak_bank,
                         "" if self.redundancy is None else self.redundancy])
        return buf.getvalue()


def apply_policy(cfg: PipelineConfig, policy: str) -> PipelineConfig:
    """Map a memory policy name onto the sampling/compression switches.

    ``dynamic`` turns adaptive sampling and compression on, ``unbounded``
    turns both off (fixed-interval sampling, unbounded bank), ``interval:k``
    samples every k frames with compression off.
    """
    if policy == "dynamic":
        return cfg.replace(asm__enabled=True, rrm__enabled=True)
    if policy == "unbounded":
        return cfg.replace(asm__enabled=False, rrm__enabled=False)
    if policy.startswith("interval:"):
        try:
            k = int(policy.split(":", 1)[1])
        except ValueError:
            raise ArgumentError(f"bad interval policy {policy!r}") from None
        if k < 1:
            raise ArgumentError("interval must be >= 1")
        return cfg.replace(asm__enabled=False, asm__interval=k, rrm__enabled=False)
    raise ArgumentError(f"unknown policy {policy!r}; expected dynamic, unbounded or interval:k")


@dataclass
class BenchmarkRun:
    report: BenchmarkReport
    results: list[FrameResult]
    segmenter: Segmenter
    gt: list[np.ndarray]


def run_segmentation(frames, gt, cfg: PipelineConfig) -> tuple[list[FrameResult], Segmenter, float]:
    """Segment a sequence; returns the results, the final segmenter and loop wall-clock seconds."""
    seg = Segmenter(cfg, num_objects_in(gt[0]))
    tic = time.perf_counter()
    results = [seg.start(frames[0], gt[0])]
    for f in frames[1:]:
        results.append(seg.step(f))
    return results, seg, time.perf_counter() - tic


def run_benchmark_full(scenario: ScenarioSpec, cfg: PipelineConfig, policy: str | None = "dynamic") -> BenchmarkRun:
    if policy is not None:
        cfg = apply_policy(cfg, policy)
    frames, gt = generate_synthetic_video(scenario)
    results, seg, elapsed = run_segmentation(frames, gt, cfg)
    pred = [r.mask for r in results]
    j, f = metric_j(pred, gt), metric_f(pred, gt)
    echo = to_flat(cfg)
    echo.update({"scenario.name": scenario.name, "scenario.frames": scenario.frames,
                 "scenario.size": f"{scenario.size[0]}x{scenario.size[1]}",
                 "scenario.replay": scenario.replay_factor, "scenario.seed": scenario.seed,
                 "policy": policy})
    report = BenchmarkReport(
        j_mean=j,
        f_mean=f,
        jf_mean=(j + f) / 2,
        fps=len(frames) / elapsed if elapsed > 0 else float("inf"),
        peak_bank=max(r.bank_size for r in results),
        redundancy=redundancy_score(seg.bank),
        per_frame_latency=[r.latency for r in results],
        config=echo,
    )
    return BenchmarkRun(report, results, seg, gt)


def run_benchmark(scenario: ScenarioSpec, cfg: PipelineConfig, policy: str | None = "dynamic") -> BenchmarkReport:
    return run_benchmark_full(scenario, cfg, policy).report


def stable_json(report: BenchmarkReport) -> str:
    """JSON of a report without the timing fields."""
    d = report.to_dict()
    for k in VOLATILE_FIELDS:
        d.pop(k)
    return json.dumps(d, sort_keys=True)
