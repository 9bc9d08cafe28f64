"""Pipeline and scenario configuration, plus the flat ``key = value`` file format.

Every key is ``section.field`` (``frm.sigma`` style) except the top-level
``seed``. Lines starting with ``#`` are comments. Unknown keys are errors.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, get_type_hints

import numpy as np

from remn.errors import ArgumentError

PATCH = 16


@dataclass
class FrmConfig:
    enabled: bool = True
    kernel: str = "3x3"
    seed: int | None = None
    center_bias: float = 4.0
    dilate: bool = True

    @property
    def extents(self) -> tuple[int, int]:
        try:
            kh, kw = (int(v) for v in self.kernel.lower().split("x"))
        except ValueError:
            raise ArgumentError(f"frm.kernel must look like 3x3, got {self.kernel!r}") from None
        if kh < 1 or kw < 1 or kh % 2 == 0 or kw % 2 == 0:
            raise ArgumentError(f"frm.kernel extents must be odd, got {self.kernel}")
        return kh, kw


@dataclass
class AsmConfig:
    enabled: bool = True
    sigma: float = 0.1
    interval: int = 5


@dataclass
class RrmConfig:
    enabled: bool = True
    capacity: int = 8
    policies: int = 2
    hidden: int = 8
    seed: int | None = None
    protect_first: bool = False


@dataclass
class EncoderConfig:
    key_channels: int = 16
    value_channels: int = 32
    key_scale: float = 60.0
    pos_weight: float = 0.0
    store_raw_key: bool = False


@dataclass
class PipelineConfig:
    seed: int = 0
    pipeline: EncoderConfig = field(default_factory=EncoderConfig)
    frm: FrmConfig = field(default_factory=FrmConfig)
    asm: AsmConfig = field(default_factory=AsmConfig)
    rrm: RrmConfig = field(default_factory=RrmConfig)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        p = self.pipeline
        if p.key_channels < 1 or p.value_channels < 1:
            raise ArgumentError("channel widths must be >= 1")
        self.frm.extents
        if not 0.0 < self.asm.sigma < 1.0:
            raise ArgumentError(f"asm.sigma must lie in (0, 1), got {self.asm.sigma}")
        if self.asm.interval < 1:
            raise ArgumentError("asm.interval must be >= 1")
        r = self.rrm
        if r.policies < 1 or r.hidden < 1 or r.capacity < 1:
            raise ArgumentError("rrm.policies, rrm.hidden and rrm.capacity must be >= 1")
        if r.capacity % 2 ** r.policies:
            raise ArgumentError(f"rrm.capacity {r.capacity} must be divisible by 2**rrm.policies = {2 ** r.policies}")

    def component_seed(self, name: str) -> int:
        """Seed for one parameter group, derived from ``seed`` unless set explicitly."""
        explicit = {"frm": self.frm.seed, "rrm": self.rrm.seed}.get(name)
        if explicit is not None:
            return explicit
        offset = {"encoders": 0, "frm": 1, "rrm": 2}[name]
        return int(np.random.SeedSequence([self.seed, offset]).generate_state(1)[0])

    def replace(self, **sections) -> "PipelineConfig":
        """Copy with flat ``section__field`` overrides, e.g. ``frm__enabled=False``."""
        flat = to_flat(self)
        for k, v in sections.items():
            flat[k.replace("__", ".")] = v
        return from_flat(flat)


@dataclass
class ScenarioSpec:
    name: str = "plain"
    frames: int = 60
    size: tuple[int, int] = (128, 128)
    replay_factor: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.name not in ("plain", "distractor", "deform", "long"):
            raise ArgumentError(f"unknown scenario {self.name!r}")
        if self.frames < 1 or self.replay_factor < 1:
            raise ArgumentError("frames and replay_factor must be >= 1")
        h0, w0 = self.size
        if h0 < PATCH or w0 < PATCH or h0 % PATCH or w0 % PATCH:
            raise ArgumentError(f"frame size must be a positive multiple of {PATCH}, got {h0}x{w0}")


def parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ArgumentError(f"size must look like 128x128, got {text!r}") from None
    return h, w


def _coerce(raw: Any, hint) -> Any:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if hint is bool:
        low = text.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ArgumentError(f"not a boolean: {raw!r}")
    if hint == (int | None):
        return None if text.lower() == "none" else _coerce(text, int)
    if hint == tuple[int, int]:
        return parse_size(text)
    try:
        return hint(text)
    except ValueError:
        raise ArgumentError(f"cannot parse {raw!r} as {hint.__name__}") from None


_SECTIONS = {"pipeline": EncoderConfig, "frm": FrmConfig, "asm": AsmConfig, "rrm": RrmConfig}


def to_flat(cfg: PipelineConfig) -> dict[str, Any]:
    flat: dict[str, Any] = {"seed": cfg.seed}
    for name in _SECTIONS:
        for key, value in dataclasses.asdict(getattr(cfg, name)).items():
            flat[f"{name}.{key}"] = value
    return flat


def from_flat(flat: dict[str, Any]) -> PipelineConfig:
    sections: dict[str, dict[str, Any]] = {name: {} for name in _SECTIONS}
    seed = 0
    hints = {name: get_type_hints(cls) for name, cls in _SECTIONS.items()}
    for key, raw in flat.items():
        if key == "seed":
            seed = _coerce(raw, int)
            continue
        section, _, name = key.partition(".")
        if section not in sections or name not in hints[section]:
            raise ArgumentError(f"unknown config key {key!r}")
        sections[section][name] = _coerce(raw, hints[section][name])
    built = {name: _SECTIONS[name](**vals) for name, vals in sections.items()}
    return PipelineConfig(seed=seed, **built)


def parse_config_text(text: str) -> tuple[PipelineConfig, ScenarioSpec]:
    """Parse a config file body into pipeline settings and a scenario."""
    pipeline_keys: dict[str, str] = {}
    scenario_keys: dict[str, Any] = {}
    scenario_hints = get_type_hints(ScenarioSpec)
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ArgumentError(f"line {lineno}: expected key = value")
        key, value = key.strip(), value.strip()
        if key.startswith("scenario."):
            name = key.split(".", 1)[1]
            if name == "replay":
                name = "replay_factor"
            if name not in scenario_hints:
                raise ArgumentError(f"unknown config key {key!r}")
            scenario_keys[name] = _coerce(value, scenario_hints[name])
        else:
            pipeline_keys[key] = value
    return from_flat(pipeline_keys), ScenarioSpec(**scenario_keys)


def load_config(path: str | Path) -> tuple[PipelineConfig, ScenarioSpec]:
    return parse_config_text(Path(path).read_text())


def dump_config(cfg: PipelineConfig, scenario: ScenarioSpec | None = None) -> str:
    lines = [f"{k} = {_fmt(v)}" for k, v in to_flat(cfg).items()]
    if scenario is not None:
        lines += [
            f"scenario.name = {scenario.name}",
            f"scenario.frames = {scenario.frames}",
            f"scenario.size = {scenario.size[0]}x{scenario.size[1]}",
            f"scenario.replay = {scenario.replay_factor}",
            f"scenario.seed = {scenario.seed}",
        ]
    return "\n".join(lines) + "\n"


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if v is None:
        return "none"
    return str(v)
