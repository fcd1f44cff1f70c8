"""Pipeline configuration.

Config files are INI-style ``key = value`` with one section per stage::

    [paths]
    in_domain = data/restaurant.train.txt
    pool = data/pool.txt
    out_dir = out/

    [filter]
    sigma_plus = 0.99

Unknown sections or keys are errors. Command-line flags override file values.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
from dataclasses import dataclass, field

from .errors import ConfigError
from .selftrain import FilterConfig


@dataclass
class Paths:
    in_domain: str | None = None
    pool: str | None = None
    out_dir: str = "out"
    test: str | None = None
    index: str | None = None
    corpus: str | None = None


@dataclass
class TextSettings:
    n_min: int = 1
    n_max: int = 3
    min_len: int = 2
    max_len: int = 40


@dataclass
class KeywordSettings:
    max_keywords: int = 500
    min_score: float = 0.0


@dataclass
class FilterSettings:
    sigma_plus: float = 0.99
    sigma_minus: float = 0.5
    sigma: float = 0.5
    lambda1: float = 10.0
    lambda2: float = 5.0
    delta: int = 100
    max_iters: int = 10
    scorer_cmd: str | None = None


@dataclass
class NluSettings:
    intent_cmd: str | None = None


@dataclass
class MetricSettings:
    lm_order: int = 3
    lm_k: float = 0.1


@dataclass
class SplitSettings:
    k_groups: int = 50


@dataclass
class PipelineConfig:
    paths: Paths = field(default_factory=Paths)
    text: TextSettings = field(default_factory=TextSettings)
    keywords: KeywordSettings = field(default_factory=KeywordSettings)
    filter: FilterSettings = field(default_factory=FilterSettings)
    nlu: NluSettings = field(default_factory=NluSettings)
    metrics: MetricSettings = field(default_factory=MetricSettings)
    split: SplitSettings = field(default_factory=SplitSettings)
    seed: int = 0

    def filter_config(self, seed: int) -> FilterConfig:
        f = self.filter
        return FilterConfig(f.sigma_plus, f.sigma_minus, f.sigma, f.lambda1, f.lambda2,
                            f.delta, f.max_iters, seed)

    def validate(self) -> "PipelineConfig":
        t = self.text
        if not 1 <= t.n_min <= t.n_max:
            raise ConfigError(f"invalid n-gram range {t.n_min}..{t.n_max}")
        if not 0 <= t.min_len <= t.max_len:
            raise ConfigError(f"invalid length bounds {t.min_len}..{t.max_len}")
        if self.keywords.max_keywords < 0:
            raise ConfigError("max_keywords must be non-negative")
        self.filter_config(self.seed)  # raises on bad thresholds
        return self

    def set(self, section: str, key: str, raw) -> None:
        """Set ``section.key`` from a string (or already-typed) value."""
        if section == "global":
            if key != "seed":
                raise ConfigError(f"unknown key '{key}' in section [global]")
            self.seed = int(raw)
            return
        target = getattr(self, section, None)
        if target is None or not dataclasses.is_dataclass(target):
            raise ConfigError(f"unknown config section [{section}]")
        types = {f.name: f.type for f in dataclasses.fields(target)}
        if key not in types:
            raise ConfigError(f"unknown key '{key}' in section [{section}]")
        setattr(target, key, _coerce(raw, types[key], f"{section}.{key}"))


def _coerce(raw, type_name, where):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    kind = str(type_name)
    try:
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from exc
    if "None" in kind and raw.lower() in ("", "none"):
        return None
    return raw


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    cfg = PipelineConfig()
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
        with open(path, encoding="utf-8") as f:
            parser.read_file(f)
        for section in parser.sections():
            for key, value in parser.items(section):
                cfg.set(section, key, value)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, key = dotted.partition(".")
        cfg.set(section, key, value)
    return cfg.validate()


def derive_seed(global_seed: int, stage: str) -> int:
    """Per-stage seed, so re-running one stage never perturbs another."""
    digest = hashlib.sha256(f"{global_seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")
