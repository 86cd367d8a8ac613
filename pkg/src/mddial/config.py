"""Experiment configuration: one YAML document bundling domain paths,
regime, error model, simulator, learning, reward, seeds, and output
directory. CLI flags override file values; everything has a default.
"""

from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from mddial.domain import load_builtin_domain, load_domain
from mddial.errormodel import ErrorConfig
from mddial.policy import LearningConfig
from mddial.simuser import SimConfig
from mddial.training import RewardConfig


@dataclass
class ExperimentConfig:
    domain: str = "restaurants"
    source_domain: str = "hotels"
    regime: str = "all"
    dialogues: int = 60000
    runs: int = 5
    seeds: list = field(default_factory=list)
    out: str = "artifacts"
    error: ErrorConfig = field(default_factory=ErrorConfig)
    simulator: SimConfig = field(default_factory=SimConfig)
    learning: LearningConfig = field(default_factory=LearningConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)


def _build(cls, raw, origin):
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{origin}: unknown keys {sorted(unknown)}")
    if cls is ErrorConfig and "dirichlet_alpha" in raw:
        raw = dict(raw, dirichlet_alpha=tuple(raw["dirichlet_alpha"]))
    return cls(**raw)


def load_config(path=None):
    """Load the experiment config; path=None yields all defaults."""
    if path is None:
        return ExperimentConfig()
    doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config must be a mapping")
    nested = {
        "error": ErrorConfig,
        "simulator": SimConfig,
        "learning": LearningConfig,
        "reward": RewardConfig,
    }
    kwargs = {}
    for key, value in doc.items():
        if key in nested:
            kwargs[key] = _build(nested[key], value or {}, f"{path}:{key}")
        else:
            kwargs[key] = value
    return _build(ExperimentConfig, kwargs, str(path))


def resolve_domain(name_or_path):
    """A builtin domain name ('restaurants', 'hotels') or a JSON file path."""
    if name_or_path in ("restaurants", "hotels"):
        return load_builtin_domain(name_or_path)
    return load_domain(name_or_path)
