"""Run configuration: built-in defaults, TOML files, and flag overrides.

Precedence is flag over file over default.  The defaults reproduce the
reference analysis settings: the standard five-by-five window grid, the
standard rhythm punctuation and duration table, ten selection bins, all
five classifiers, feature counts 3 through 50, and an edge threshold of
one half.
"""

import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - version fallback
    import tomli as tomllib

from .errors import ConfigError
from .learning import CLASSIFIER_KINDS, ClassifierConfig
from .timeline import RHYTHM_PUNCTUATION, DurationTable
from .windowing import (STANDARD_CV_JUMPS, STANDARD_PAIR_COUNTS,
                        WindowingParams)

ENV_CONFIG = "PROSODEX_CONFIG"


@dataclass(frozen=True)
class Config:
    lexicon_path: Optional[str] = None
    corpus_dir: Optional[str] = None
    pair_counts: tuple = STANDARD_PAIR_COUNTS
    cv_jumps: tuple = STANDARD_CV_JUMPS
    rhythm_punct: tuple = tuple(sorted(RHYTHM_PUNCTUATION))
    durations: tuple = ()
    nmi_bins: int = 10
    classifiers: tuple = CLASSIFIER_KINDS
    nf_min: int = 3
    nf_max: int = 50
    tau: float = 0.5
    seed: int = 0
    jobs: int = 1


def _want(key, value, kinds):
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ConfigError(f"config key {key!r} has the wrong type")
    return value


def _string_list(key, value):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"config key {key!r} must be a non-empty list")
    return tuple(_want(key, item, str) for item in value)


def _number_list(key, value, kinds):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"config key {key!r} must be a non-empty list")
    return tuple(_want(key, item, kinds) for item in value)


def config_from_mapping(data: dict) -> Config:
    """Build a Config from parsed TOML, rejecting unknown keys."""
    fields = {}
    for key, value in data.items():
        if key in ("lexicon_path", "corpus_dir"):
            fields[key] = _want(key, value, str)
        elif key == "pair_counts":
            fields[key] = _number_list(key, value, int)
        elif key == "cv_jumps":
            fields[key] = _number_list(key, value, (int, float))
        elif key in ("rhythm_punct", "classifiers"):
            fields[key] = _string_list(key, value)
        elif key == "durations":
            if not isinstance(value, dict):
                raise ConfigError("config key 'durations' must be a table")
            fields[key] = tuple(
                (_want("durations", mark, str), _want("durations", units, int))
                for mark, units in value.items())
        elif key in ("nmi_bins", "nf_min", "nf_max", "seed", "jobs"):
            fields[key] = _want(key, value, int)
        elif key == "tau":
            fields[key] = float(_want(key, value, (int, float)))
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return validated(Config(**fields))


def validated(config: Config) -> Config:
    for count in config.pair_counts:
        if count < 1:
            raise ConfigError("pair counts must be at least 1")
    for jump in config.cv_jumps:
        if jump <= 0.0:
            raise ConfigError("cv jumps must be positive")
    for mark in config.rhythm_punct:
        if not mark:
            raise ConfigError("rhythm punctuation marks cannot be empty")
    for mark, units in config.durations:
        if not mark or units < 0:
            raise ConfigError(f"bad duration override for {mark!r}")
    if config.nmi_bins < 2:
        raise ConfigError("nmi_bins must be at least 2")
    if not config.classifiers:
        raise ConfigError("at least one classifier is required")
    for kind in config.classifiers:
        if kind not in CLASSIFIER_KINDS:
            raise ConfigError(f"unknown classifier {kind!r}; "
                              f"pick from {CLASSIFIER_KINDS}")
    if not 1 <= config.nf_min <= config.nf_max:
        raise ConfigError("need 1 <= nf_min <= nf_max")
    if config.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    return config


def resolve_config_path(flag_value: Optional[str]) -> Optional[str]:
    """The --config flag wins over the environment variable."""
    if flag_value is not None:
        return flag_value
    return os.environ.get(ENV_CONFIG) or None


def load_config(path: Optional[str] = None) -> Config:
    if path is None:
        return Config()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    return config_from_mapping(data)


def override(config: Config, **changes) -> Config:
    """Apply non-None keyword overrides and re-validate."""
    kept = {key: value for key, value in changes.items() if value is not None}
    return validated(dataclasses.replace(config, **kept))


# -- views consumed by the pipeline ------------------------------------------

def window_grid(config: Config) -> list:
    return [WindowingParams(initial_pairs=count, cv_jump=jump)
            for count in config.pair_counts for jump in config.cv_jumps]


def duration_table(config: Config) -> DurationTable:
    return DurationTable.standard(dict(config.durations) or None)


def punctuation(config: Config) -> frozenset:
    return frozenset(config.rhythm_punct)


def nf_values(config: Config) -> range:
    return range(config.nf_min, config.nf_max + 1)


def classifier_configs(config: Config) -> list:
    return [ClassifierConfig.make(kind, seed=config.seed)
            for kind in config.classifiers]
