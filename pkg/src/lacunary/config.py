"""Experiment configuration: one JSON document, overridden by CLI flags."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

PRESETS = ("erdos-fortet", "clt-pow2", "theoremA-scan", "theoremB-blowup", "martingale-diag")


class ConfigError(ValueError):
    pass


@dataclass
class SamplerSpec:
    seed: int | None = None
    samples: int | None = None
    strata_bits: int = 16
    depth: int | None = None
    threads: int | None = None


@dataclass
class BlowupSpec:
    """Parameters of the counterexample experiment (d, eps, delta and the h_I rule)."""

    I: int = 3
    d: int = 4
    eps: float = 0.75
    delta: float = 0.01
    sub_steps: int = 10
    factor: float = 5.0


@dataclass
class ExperimentConfig:
    preset: str | None = None
    sequence: str | None = None
    f: str = "cos:1=1"
    N: list[int] = field(default_factory=list)
    growth: str = "identity"
    t_max_mult: float = 0.6
    steps: int = 13
    level: float = 0.99
    undashed: int = 16
    dashed: int = 8
    margin: float | None = None
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    blowup: BlowupSpec = field(default_factory=BlowupSpec)
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(data)
        for key, typ in (("sampler", SamplerSpec), ("blowup", BlowupSpec)):
            if key in kw:
                sub = kw[key]
                if not isinstance(sub, dict):
                    raise ConfigError(f"{key} must be an object")
                names = {f.name for f in fields(typ)}
                bad = set(sub) - names
                if bad:
                    raise ConfigError(f"unknown {key} keys: {sorted(bad)}")
                kw[key] = typ(**sub)
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data)

    def validate(self) -> None:
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {PRESETS}")
        if not isinstance(self.N, list) or not all(isinstance(n, int) and n >= 1 for n in self.N):
            raise ConfigError("N must be a list of positive integers")
        s = self.sampler
        if s.seed is not None and (not isinstance(s.seed, int) or not 0 <= s.seed < 2**64):
            raise ConfigError("sampler.seed must be an integer in [0, 2^64)")
        if s.samples is not None and (not isinstance(s.samples, int) or s.samples < 1):
            raise ConfigError("sampler.samples must be a positive integer")
        if not 0 < self.level < 1:
            raise ConfigError("level must lie in (0, 1)")
        b = self.blowup
        if b.d < 1 or b.eps <= 0 or b.delta < 0 or b.I < 0:
            raise ConfigError("blowup needs d >= 1, eps > 0, delta >= 0, I >= 0")

    def to_dict(self) -> dict:
        return asdict(self)
