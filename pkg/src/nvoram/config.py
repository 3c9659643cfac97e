"""Simulation configuration: dataclasses plus strict JSON loading."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field, fields
from fractions import Fraction

from nvoram.eoram.partition import MAX_LEVELS, partition
from nvoram.eoram.schedule import MODES

LEVELERS = ("none", "startgap", "eoram")
WORKLOADS = ("uniform", "zipf", "trace")


class ConfigError(ValueError):
    pass


@dataclass
class StartGapConfig:
    regions: int = 256
    psi: int = 100
    randomizer_seed: int = 0


@dataclass
class WorkloadConfig:
    kind: str = "uniform"
    theta: float = 0.99
    trace: str | None = None
    write_fraction: float = 0.5


@dataclass
class SimConfig:
    levels: int = 16
    bucket_slots: int = 4
    block_bytes: int = 64
    wmax: int = 10_000
    failed_fraction: str = "0.01"
    wear_leveler: str = "eoram"
    freq: int = 10_000
    scheduler: str = "balanced"
    startgap: StartGapConfig = field(default_factory=StartGapConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    max_accesses: int = 10**10
    seed: int = 0
    stash_capacity: int = 200
    max_blocks: int | None = None
    full_oram: bool = False
    progress_every: int = 10**7
    out_dir: str | None = None

    def validate(self) -> "SimConfig":
        if not 1 <= self.levels <= MAX_LEVELS:
            raise ConfigError(f"levels must be in [1, {MAX_LEVELS}]")
        for name in ("bucket_slots", "block_bytes", "wmax", "freq", "max_accesses",
                     "stash_capacity", "progress_every"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.max_blocks is not None and self.max_blocks < 1:
            raise ConfigError("max_blocks must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.wear_leveler not in LEVELERS:
            raise ConfigError(f"wear_leveler must be one of {LEVELERS}")
        if self.scheduler not in MODES:
            raise ConfigError(f"scheduler must be one of {MODES}")
        if self.startgap.regions < 1 or self.startgap.psi < 1:
            raise ConfigError("startgap regions and psi must be positive")
        if self.workload.kind not in WORKLOADS:
            raise ConfigError(f"workload.kind must be one of {WORKLOADS}")
        if self.workload.kind == "trace" and not self.workload.trace:
            raise ConfigError("trace workload needs workload.trace")
        if not 0 <= self.workload.write_fraction <= 1:
            raise ConfigError("workload.write_fraction must be in [0, 1]")
        try:
            frac = Fraction(self.failed_fraction)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"bad failed_fraction {self.failed_fraction!r}") from e
        if not 0 <= frac < 1:
            raise ConfigError("failed_fraction must be in [0, 1)")
        if self.wear_leveler == "eoram":
            k = partition(self.levels).mfan_level
            if self.freq < k + 1:
                raise ConfigError(f"freq {self.freq} must be >= K+1 = {k + 1}")
        return self

    @property
    def node_count(self) -> int:
        return (1 << self.levels) - 1

    @property
    def block_count(self) -> int:
        return self.max_blocks if self.max_blocks is not None else 1 << (self.levels - 1)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    kwargs = {}
    for name, value in data.items():
        if name == "startgap":
            value = _build(StartGapConfig, value, "startgap")
        elif name == "workload":
            value = _build(WorkloadConfig, value, "workload")
        kwargs[name] = value
    return cls(**kwargs)


def config_from_dict(data: dict) -> SimConfig:
    data = dict(data)
    if "failed_fraction" in data:
        data["failed_fraction"] = str(data["failed_fraction"])
    return _build(SimConfig, data, "config").validate()


def merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **v}
        else:
            out[k] = v
    return out


def load_json(path: str | os.PathLike):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e


def load_config(path: str | os.PathLike) -> SimConfig:
    return config_from_dict(load_json(path))


def load_compare_configs(path: str | os.PathLike) -> list[SimConfig]:
    """A list of full configs, or ``{"base": {...}, "runs": [{...}, ...]}``."""
    data = load_json(path)
    if isinstance(data, dict):
        if set(data) - {"base", "runs"}:
            raise ConfigError("compare file keys must be 'base' and 'runs'")
        base = data.get("base", {})
        runs = [merge(base, r) for r in data.get("runs", [])]
    elif isinstance(data, list):
        runs = data
    else:
        raise ConfigError("compare file must be a list or an object")
    return [config_from_dict(r) for r in runs]
