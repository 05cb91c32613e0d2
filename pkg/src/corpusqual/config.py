"""Run configuration and the word/term resources it points to."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import mentions, spellscan, textmetrics
from .ingest import DEFAULT_RULES, ExclusionRule, load_rules

FORMATS = ("json", "csv", "markdown")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    corpus: Optional[Path] = None
    groups: list[str] = field(default_factory=list)
    output_dir: Path = Path("report")
    formats: list[str] = field(default_factory=lambda: list(FORMATS))
    alpha: float = 0.05
    tails: str = "two"
    correction: str = "holm"
    force_pairwise: bool = False
    dictionary: Optional[Path] = None
    allowlist: Optional[Path] = None
    ethics_terms: Optional[Path] = None
    consent_terms: Optional[Path] = None
    abbreviations: Optional[Path] = None
    exclusion_keywords: Optional[Path] = None
    filter_non_research: bool = True
    window_years: int = 3
    citations_as_of: Optional[int] = None
    enrich: bool = False
    endpoint: Optional[str] = None
    cache_dir: Path = Path(".corpusqual_cache")
    offline: bool = False
    workers: int = 1
    plots: bool = True
    svg: bool = False
    statcheck_dump: bool = False
    warn_threshold: Optional[float] = None

    _PATHS = (
        "corpus", "output_dir", "dictionary", "allowlist", "ethics_terms",
        "consent_terms", "abbreviations", "exclusion_keywords", "cache_dir",
    )

    def __post_init__(self):
        for name in self._PATHS:
            value = getattr(self, name)
            if value is not None and not isinstance(value, Path):
                setattr(self, name, Path(value))
        self.groups = list(self.groups)
        self.formats = list(self.formats)

    def validate(self, need_corpus: bool = True) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.tails not in ("two", "one"):
            raise ConfigError("tails must be 'two' or 'one'")
        if self.correction not in ("holm", "bonferroni", "none"):
            raise ConfigError("correction must be holm, bonferroni or none")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown formats {bad}")
        if self.window_years < 1:
            raise ConfigError("window_years must be >= 1")
        if need_corpus:
            if self.corpus is None:
                raise ConfigError("no corpus given")
            if len(self.groups) < 2:
                raise ConfigError("at least two group labels are required")
        for name in ("dictionary", "allowlist", "ethics_terms", "consent_terms",
                     "abbreviations", "exclusion_keywords"):
            path = getattr(self, name)
            if path is not None and not path.is_file():
                raise ConfigError(f"{name}: no such file {path}")

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            out[f.name] = str(value) if isinstance(value, Path) else value
        return out

    def digest(self) -> str:
        """Stable hash of the settings that affect computed results."""
        d = self.to_dict()
        for volatile in ("output_dir", "workers", "cache_dir", "formats", "plots", "svg"):
            d.pop(volatile, None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def load_config_file(path: str | Path) -> dict:
    """Read a TOML key/value config; keys must be RunConfig field names."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return data


@dataclass(frozen=True)
class Resources:
    """Loaded word sets and term lists for indicator computation."""

    dictionary: frozenset
    allowlist: frozenset
    ethics_terms: tuple
    consent_terms: tuple
    abbreviations: frozenset
    exclusion_rules: tuple[ExclusionRule, ...]

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "Resources":
        return cls(
            dictionary=spellscan.load_wordlist(cfg.dictionary) if cfg.dictionary else spellscan.default_dictionary(),
            allowlist=spellscan.load_wordlist(cfg.allowlist) if cfg.allowlist else frozenset(),
            ethics_terms=mentions.load_terms(cfg.ethics_terms) if cfg.ethics_terms else mentions.default_ethics_terms(),
            consent_terms=mentions.load_terms(cfg.consent_terms) if cfg.consent_terms else mentions.default_consent_terms(),
            abbreviations=textmetrics.load_abbreviations(cfg.abbreviations) if cfg.abbreviations else textmetrics.default_abbreviations(),
            exclusion_rules=tuple(load_rules(cfg.exclusion_keywords)) if cfg.exclusion_keywords else DEFAULT_RULES,
        )
