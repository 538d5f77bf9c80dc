"""Pipeline configuration: defaults, key-value config files, config hashing.

Config files are plain text, one `section.key = value` per line, `#` starts a
comment. Command-line flags override file values. Every random choice in the
pipeline draws from an explicit seed recorded here, so a config hash pins the
entire run: artifacts embed the hash and identical configs reproduce
byte-identical outputs.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from ._util import canonical_json
from .errors import ConfigError


@dataclass
class SynthConfig:
    n: int = 441
    seed: int = 7


@dataclass
class DelphiConfig:
    experts: int = 20
    epsilon: float = 2.0
    max_rounds: int = 10
    contraction: float = 0.6
    noise_sd: float = 1.0
    initial_sd: float = 3.0
    seed: int = 11


@dataclass
class SplitConfig:
    fraction: float = 0.2
    seed: int = 13


@dataclass
class CvConfig:
    k: int = 5
    seed: int = 17


@dataclass
class LassoConfig:
    max_sweeps: int = 2000
    tol: float = 1e-8
    grid_size: int = 50


@dataclass
class GbtConfig:
    n_trees: int = 200
    learning_rate: float = 0.1
    max_depth: int = 4
    reg_lambda: float = 1.0
    gamma_split: float = 0.0
    min_child_hessian: float = 1.0


@dataclass
class HistConfig:
    max_bins: int = 256
    goss: bool = True
    top_rate: float = 0.2
    other_rate: float = 0.1
    efb: bool = True
    seed: int = 23


@dataclass
class EnsembleConfig:
    step: float = 0.05
    restarts: int = 2
    seed: int = 19


@dataclass
class PipelineConfig:
    synth: SynthConfig = field(default_factory=SynthConfig)
    delphi: DelphiConfig = field(default_factory=DelphiConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    cv: CvConfig = field(default_factory=CvConfig)
    lasso: LassoConfig = field(default_factory=LassoConfig)
    gbt: GbtConfig = field(default_factory=GbtConfig)
    hist: HistConfig = field(default_factory=HistConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)

    def to_doc(self) -> dict:
        return dataclasses.asdict(self)

    def hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_doc()).encode()).hexdigest()[:16]


def _coerce_value(current, raw: str):
    if isinstance(current, bool):
        low = raw.strip().lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(current, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"expected an integer, got {raw!r}") from None
    if isinstance(current, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"expected a number, got {raw!r}") from None
    return raw


def apply_setting(config: PipelineConfig, dotted_key: str, raw: str) -> None:
    parts = dotted_key.strip().split(".")
    if len(parts) != 2:
        raise ConfigError(f"config keys are section.key, got {dotted_key!r}")
    section, key = parts
    if not hasattr(config, section):
        raise ConfigError(f"unknown config section {section!r}")
    target = getattr(config, section)
    if not hasattr(target, key):
        raise ConfigError(f"unknown config key {section}.{key}")
    current = getattr(target, key)
    setattr(target, key, _coerce_value(current, raw))


def load_config(path: str | Path | None = None) -> PipelineConfig:
    config = PipelineConfig()
    if path is None:
        return config
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = stripped.split("=", 1)
        apply_setting(config, key.strip(), raw.strip())
    return config
