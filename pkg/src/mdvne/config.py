"""Experiment configuration: a YAML file with substrate / stream / algorithm / experiment sections."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .baseline import TGAParams
from .lbhga import LBHGAParams
from .sim import ALGORITHMS
from .topology import SubstrateConfig, VnrStreamConfig

REQUIRED = ("substrate.domain_count", "substrate.nodes_per_domain", "experiment.seeds")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass
class ExperimentConfig:
    seeds: list[int] = field(default_factory=lambda: [1])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    out_dir: str = "results"
    retry_limit: int = 5
    bucket: float = 100.0
    jobs: int = 1


@dataclass
class Config:
    substrate: SubstrateConfig
    stream: VnrStreamConfig
    lbhga: LBHGAParams
    tga: TGAParams
    experiment: ExperimentConfig

    def params(self, algorithm: str):
        return self.lbhga if algorithm == "lbhga" else self.tga


def _coerce(key, value, default):
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(key, f"expected a two-element range, got {value!r}")
        return tuple(_coerce(key, v, default[0]) for v in value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    return value


def _build(cls, section: str, raw):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(section, "expected a mapping")
    defaults = cls()
    names = {f.name for f in dataclasses.fields(cls)}
    values = {}
    for key, value in raw.items():
        if key not in names:
            raise ConfigError(f"{section}.{key}", "unknown key")
        values[key] = _coerce(f"{section}.{key}", value, getattr(defaults, key))
    obj = cls(**values)
    validate = getattr(obj, "validate", None)
    if validate is not None:
        try:
            validate()
        except ValueError as exc:
            raise ConfigError(section, str(exc)) from None
    return obj


def _experiment(raw) -> ExperimentConfig:
    exp = _build(ExperimentConfig, "experiment", raw)
    if not isinstance(exp.seeds, list) or not exp.seeds or not all(isinstance(s, int) and not isinstance(s, bool) for s in exp.seeds):
        raise ConfigError("experiment.seeds", "expected a non-empty list of integers")
    if not isinstance(exp.algorithms, list) or not exp.algorithms:
        raise ConfigError("experiment.algorithms", "expected a non-empty list")
    for alg in exp.algorithms:
        if alg not in ALGORITHMS:
            raise ConfigError("experiment.algorithms", f"unknown algorithm {alg!r}")
    if exp.retry_limit < 1 or exp.bucket <= 0 or exp.jobs < 1:
        raise ConfigError("experiment", "retry_limit and jobs must be >= 1, bucket > 0")
    return exp


def parse_config(raw: dict) -> Config:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a mapping")
    for key in raw:
        if key not in ("substrate", "stream", "algorithm", "experiment"):
            raise ConfigError(key, "unknown section")
    for dotted in REQUIRED:
        section, key = dotted.split(".")
        if not isinstance(raw.get(section), dict) or key not in raw[section]:
            raise ConfigError(dotted, "required key missing")
    algorithm = raw.get("algorithm") or {}
    if not isinstance(algorithm, dict):
        raise ConfigError("algorithm", "expected a mapping")
    for key in algorithm:
        if key not in ALGORITHMS:
            raise ConfigError(f"algorithm.{key}", "unknown algorithm section")
    return Config(
        substrate=_build(SubstrateConfig, "substrate", raw.get("substrate")),
        stream=_build(VnrStreamConfig, "stream", raw.get("stream")),
        lbhga=_build(LBHGAParams, "algorithm.lbhga", algorithm.get("lbhga")),
        tga=_build(TGAParams, "algorithm.tga", algorithm.get("tga")),
        experiment=_experiment(raw.get("experiment")),
    )


def load_config(path) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"{path} is not valid YAML: {exc}") from None
    return parse_config(raw)
