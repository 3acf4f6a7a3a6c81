"""Flat ``key = value`` experiment configuration.

Lists are comma separated; a numeric range may be written ``start:stop:step``
(stop inclusive), e.g. ``r_list = 0:0.1:0.002``. Lines starting with ``#`` are
comments. Keys not given in a file fall back to the per-experiment defaults
below, so an empty file is a valid config.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from ..core import ModelParams, SimGrid
from ..exceptions import ParameterError

EXPERIMENTS = ("single-path", "ergodicity-sweep", "self-averaging", "regimes-timeseries", "analytics-table")


class ConfigError(ParameterError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "single-path"
    mu: float = 0.05
    sigma2: float = 0.02
    r: float = 0.16
    x0: float = 1.0
    dt: float = 0.01
    horizon: float = 100.0
    stride: int = 1
    N_list: tuple = (1,)
    r_list: tuple = (0.16,)
    regime_rates: tuple = (0.01, 0.03, 0.08)
    realizations: int = 1
    timeseries_realizations: int = 3
    mc_samples: int = 100_000
    fraction: float = 0.01
    method: str = "exact"
    master_seed: int = 20200917
    output_dir: str = "results"
    emit_plots: bool = False

    @property
    def params(self) -> ModelParams:
        return ModelParams(mu=self.mu, sigma2=self.sigma2, r=self.r, x0=self.x0)

    @property
    def grid(self) -> SimGrid:
        return SimGrid.from_horizon(self.horizon, self.dt)

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        for name in ("N_list", "r_list", "regime_rates"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name} must be non-empty")
        if any(n < 1 for n in self.N_list):
            raise ConfigError("every N in N_list must be >= 1")
        if any(r < 0 for r in self.r_list + self.regime_rates):
            raise ConfigError("resetting rates must be >= 0")
        for name in ("realizations", "timeseries_realizations", "mc_samples", "stride"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 < self.fraction <= 1:
            raise ConfigError("fraction must be in (0, 1]")
        if self.method not in ("exact", "euler"):
            raise ConfigError("method must be 'exact' or 'euler'")
        if not self.horizon > 0:
            raise ConfigError("horizon must be > 0")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        try:
            self.params
            grid = self.grid
            for r in (self.r,) + tuple(self.r_list) + tuple(self.regime_rates):
                grid.check_rate(r)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def canonical(self) -> str:
        """Stable text form of every field that influences results."""
        skip = {"output_dir", "emit_plots"}
        return "\n".join(f"{f.name} = {_format(getattr(self, f.name))}" for f in fields(self) if f.name not in skip)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


_DESK_R_GRID = tuple(float(v) for v in np.round(np.arange(0, 51) * 0.002, 10))

DEFAULTS = {
    "single-path": dict(mu=0.05, sigma2=0.02, r=0.16, dt=0.01, horizon=100.0),
    # full scale: horizon = 1e5, realizations = 1e4
    "ergodicity-sweep": dict(
        mu=0.02, sigma2=0.01, r=0.02, horizon=1000.0, N_list=(1, 100, 1000, 10000),
        r_list=_DESK_R_GRID, realizations=100,
    ),
    "self-averaging": dict(
        mu=0.02, sigma2=0.01, r=0.02, N_list=(1, 100, 1000, 10000), r_list=_DESK_R_GRID,
    ),
    # full scale: N = 1e4, horizon = 1e5, realizations = 1e4
    "regimes-timeseries": dict(
        mu=0.02, sigma2=0.01, r=0.03, dt=0.01, horizon=1000.0, stride=100, N_list=(1000,),
        r_list=_DESK_R_GRID, realizations=100,
    ),
    "analytics-table": dict(
        mu=0.02, sigma2=0.01, r=0.02, horizon=50.0, r_list=(0.01, 0.02, 0.03, 0.05, 0.08),
    ),
}


def default_config(experiment: str) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    return replace(ExperimentConfig(experiment=experiment), **DEFAULTS[experiment])


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(config: ExperimentConfig) -> str:
    lines = [
        "# srgbm experiment configuration: one `key = value` per line.",
        "# Lists are comma separated; `start:stop:step` expands to an inclusive range.",
    ]
    lines += [f"{f.name} = {_format(getattr(config, f.name))}" for f in fields(config)]
    return "\n".join(lines) + "\n"


def _parse_list(text: str, kind):
    items = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"range {part!r} must be start:stop:step")
            start, stop, step = (float(b) for b in bits)
            if step <= 0:
                raise ConfigError(f"range step must be > 0 in {part!r}")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            items.extend(kind(v) for v in np.round(start + step * np.arange(n), 12))
        else:
            items.append(kind(float(part)) if kind is int else kind(part))
    return tuple(items)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


_PARSERS = {
    "experiment": str.strip,
    "method": str.strip,
    "output_dir": str.strip,
    "emit_plots": _parse_bool,
    "N_list": lambda s: _parse_list(s, int),
    "r_list": lambda s: _parse_list(s, float),
    "regime_rates": lambda s: _parse_list(s, float),
    "stride": int,
    "realizations": int,
    "timeseries_realizations": int,
    "mc_samples": int,
    "master_seed": int,
}


def parse(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse config text; ``experiment`` overrides the file's own ``experiment`` key."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    raw = dict(parser["config"])
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    exp = experiment or raw.get("experiment", "single-path").strip()
    base = default_config(exp)
    values = {}
    for key, text_value in raw.items():
        if key == "experiment":
            continue
        conv = _PARSERS.get(key, float)
        try:
            values[key] = conv(text_value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {text_value!r}") from exc
    return replace(base, **values).validate()


def load(path, experiment: str | None = None) -> ExperimentConfig:
    return parse(Path(path).read_text(encoding="utf-8"), experiment=experiment)
