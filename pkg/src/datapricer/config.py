"""Experiment configuration: a small YAML schema with a validating loader.

Top-level layout (``schema: 1``)::

    schema: 1
    instance:
      n_total: 50
      valuations:                  # one of the three families
        family: power_law
        specs:
          - {alpha: 0.95, beta: 0.4, gamma: 0.5}
          - {alpha: 0.80, beta: 0.4, gamma: 0.5}
        # family: random_monotone  -> seeds: [..], knots: 4
        # family: explicit         -> values: [[0, ...], [0, ...]]
      smoothness: measured         # or a positive number
      diminishing: measured        # or a positive number
    space:
      scheme: smooth               # monotone | smooth | diminishing
      epsilon: auto                # or a number in (0, 1)
      auto_coeff: 10.0             # epsilon = min(auto_coeff / sqrt(T), 0.95)
      prune: true                  # drop value levels above the top valuation
      cap: 10000000
    setting:
      kind: stochastic             # or adversarial
      weights: [0.6, 0.4]          # stochastic only
      # sequence: {kind: blocks, k: 2}   # adversarial only
      # theta: default             # or a positive number (adversarial only)
    run:
      horizon: 4000                # single horizon...
      horizons: [1000, 4000]       # ...or a sweep list (horizon then optional)
      seeds: [0, 1, 2]

Validation errors name the offending key path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .market import MarketInstance, ValuationCurve
from .valuations import (
    PowerLawSpec,
    measure_instance_constants,
    power_law_curve,
    random_monotone_curve,
)

SCHEMA_VERSION = 1

AUTO_EPSILON_CEILING = 0.95


class ConfigError(ValueError):
    """A configuration file failed validation."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _require(mapping, key, path, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        _fail(f"{path}.{key}", "missing required key")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        _fail(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class InstanceSpec:
    n_total: int
    family: str
    family_params: dict
    smoothness: float | str = "measured"
    diminishing: float | str = "measured"


@dataclass(frozen=True)
class SpaceSpec:
    scheme: str
    epsilon: float | str = "auto"
    auto_coeff: float = 1.0
    prune: bool = True
    cap: int = 10_000_000


@dataclass(frozen=True)
class SettingSpec:
    kind: str
    weights: tuple[float, ...] | None = None
    sequence: dict | None = None
    theta: float | None = None


@dataclass(frozen=True)
class RunSpec:
    horizons: tuple[int, ...]
    seeds: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return self.horizons[0]


@dataclass(frozen=True)
class ExperimentConfig:
    instance: InstanceSpec
    space: SpaceSpec
    setting: SettingSpec
    run: RunSpec

    def echo(self) -> dict:
        """JSON-safe copy of the configuration for summary files."""
        return {
            "schema": SCHEMA_VERSION,
            "instance": {
                "n_total": self.instance.n_total,
                "family": self.instance.family,
                "family_params": self.instance.family_params,
                "smoothness": self.instance.smoothness,
                "diminishing": self.instance.diminishing,
            },
            "space": {
                "scheme": self.space.scheme,
                "epsilon": self.space.epsilon,
                "auto_coeff": self.space.auto_coeff,
                "prune": self.space.prune,
                "cap": self.space.cap,
            },
            "setting": {
                "kind": self.setting.kind,
                "weights": list(self.setting.weights) if self.setting.weights else None,
                "sequence": self.setting.sequence,
                "theta": self.setting.theta,
            },
            "run": {"horizons": list(self.run.horizons), "seeds": list(self.run.seeds)},
        }


def _parse_instance(raw: dict) -> InstanceSpec:
    n_total = _require(raw, "n_total", "instance", int)
    if n_total < 1:
        _fail("instance.n_total", "must be >= 1")
    valuations = _require(raw, "valuations", "instance", dict)
    family = _require(valuations, "family", "instance.valuations", str)
    params: dict
    if family == "power_law":
        specs = _require(valuations, "specs", "instance.valuations", list)
        if not specs:
            _fail("instance.valuations.specs", "needs at least one spec")
        for i, s in enumerate(specs):
            for key in ("alpha", "beta", "gamma"):
                if not isinstance(s, dict) or key not in s:
                    _fail(f"instance.valuations.specs[{i}].{key}", "missing")
        params = {"specs": specs}
    elif family == "random_monotone":
        seeds = _require(valuations, "seeds", "instance.valuations", list)
        if not seeds:
            _fail("instance.valuations.seeds", "needs at least one seed")
        knots = int(valuations.get("knots", 4))
        if knots < 1:
            _fail("instance.valuations.knots", "must be >= 1")
        params = {"seeds": seeds, "knots": knots}
    elif family == "explicit":
        values = _require(valuations, "values", "instance.valuations", list)
        if not values:
            _fail("instance.valuations.values", "needs at least one curve")
        for i, v in enumerate(values):
            if not isinstance(v, list) or len(v) != n_total + 1:
                _fail(
                    f"instance.valuations.values[{i}]",
                    f"needs exactly n_total+1 = {n_total + 1} numbers",
                )
        params = {"values": values}
    else:
        _fail("instance.valuations.family", f"unknown family {family!r}")

    def constant(key):
        v = raw.get(key, "measured")
        if v == "measured":
            return v
        if not isinstance(v, (int, float)) or v <= 0:
            _fail(f"instance.{key}", "must be 'measured' or a positive number")
        return float(v)

    return InstanceSpec(
        n_total=n_total,
        family=family,
        family_params=params,
        smoothness=constant("smoothness"),
        diminishing=constant("diminishing"),
    )


def _parse_space(raw: dict) -> SpaceSpec:
    scheme = _require(raw, "scheme", "space", str)
    if scheme not in ("monotone", "smooth", "diminishing"):
        _fail("space.scheme", f"unknown scheme {scheme!r}")
    eps = raw.get("epsilon", "auto")
    if eps != "auto":
        if not isinstance(eps, (int, float)) or not 0 < eps < 1:
            _fail("space.epsilon", "must be 'auto' or a number in (0, 1)")
        eps = float(eps)
    coeff = raw.get("auto_coeff", 1.0)
    if not isinstance(coeff, (int, float)) or coeff <= 0:
        _fail("space.auto_coeff", "must be a positive number")
    cap = raw.get("cap", 10_000_000)
    if not isinstance(cap, int) or cap < 1:
        _fail("space.cap", "must be a positive integer")
    return SpaceSpec(
        scheme=scheme,
        epsilon=eps,
        auto_coeff=float(coeff),
        prune=bool(raw.get("prune", True)),
        cap=cap,
    )


def _parse_setting(raw: dict, m: int) -> SettingSpec:
    kind = _require(raw, "kind", "setting", str)
    if kind == "stochastic":
        weights = _require(raw, "weights", "setting", list)
        if len(weights) != m:
            _fail("setting.weights", f"needs exactly m = {m} entries")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            _fail("setting.weights", "must be non-negative and sum to 1 within 1e-12")
        return SettingSpec(kind=kind, weights=tuple(float(x) for x in weights))
    if kind == "adversarial":
        sequence = _require(raw, "sequence", "setting", dict)
        if "kind" not in sequence:
            _fail("setting.sequence.kind", "missing required key")
        theta = raw.get("theta", "default")
        if theta == "default":
            theta_val = None
        elif isinstance(theta, (int, float)) and theta > 0:
            theta_val = float(theta)
        else:
            _fail("setting.theta", "must be 'default' or a positive number")
        return SettingSpec(kind=kind, sequence=dict(sequence), theta=theta_val)
    _fail("setting.kind", f"unknown kind {kind!r}")


def _parse_run(raw: dict) -> RunSpec:
    if "horizons" in raw:
        horizons = raw["horizons"]
        if not isinstance(horizons, list) or not horizons:
            _fail("run.horizons", "must be a non-empty list of integers")
    elif "horizon" in raw:
        horizons = [raw["horizon"]]
    else:
        _fail("run", "needs 'horizon' or 'horizons'")
    for h in horizons:
        if not isinstance(h, int) or h < 0:
            _fail("run.horizons", f"horizons must be integers >= 0, got {h!r}")
    seeds = _require(raw, "seeds", "run", list)
    if not seeds or not all(isinstance(s, int) for s in seeds):
        _fail("run.seeds", "must be a non-empty list of integers")
    return RunSpec(horizons=tuple(horizons), seeds=tuple(seeds))


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a mapping")
    schema = raw.get("schema")
    if schema != SCHEMA_VERSION:
        _fail("schema", f"expected {SCHEMA_VERSION}, got {schema!r}")
    instance = _parse_instance(_require(raw, "instance", "", dict))
    space = _parse_space(_require(raw, "space", "", dict))
    m = _family_size(instance)
    setting = _parse_setting(_require(raw, "setting", "", dict), m)
    run = _parse_run(_require(raw, "run", "", dict))
    return ExperimentConfig(instance=instance, space=space, setting=setting, run=run)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:  # yaml errors carry line/column marks
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw)


def _family_size(spec: InstanceSpec) -> int:
    if spec.family == "power_law":
        return len(spec.family_params["specs"])
    if spec.family == "random_monotone":
        return len(spec.family_params["seeds"])
    return len(spec.family_params["values"])


def build_instance(cfg: ExperimentConfig) -> MarketInstance:
    """Materialize the valuation curves and resolve L / J constants."""
    spec = cfg.instance
    n = spec.n_total
    if spec.family == "power_law":
        curves = tuple(
            power_law_curve(PowerLawSpec(s["alpha"], s["beta"], s["gamma"]), n)
            for s in spec.family_params["specs"]
        )
    elif spec.family == "random_monotone":
        knots = spec.family_params["knots"]
        curves = tuple(
            random_monotone_curve(seed, n, knots) for seed in spec.family_params["seeds"]
        )
    else:
        curves = tuple(
            ValuationCurve(np.asarray(v, dtype=float)) for v in spec.family_params["values"]
        )
    l_meas, j_meas = measure_instance_constants(curves)
    smoothness = l_meas if spec.smoothness == "measured" else spec.smoothness
    diminishing = j_meas if spec.diminishing == "measured" else spec.diminishing
    return MarketInstance(
        n_total=n,
        valuations=curves,
        smoothness=smoothness if smoothness > 0 else None,
        diminishing=diminishing if diminishing > 0 else None,
    )


def resolve_epsilon(cfg: ExperimentConfig, horizon: int) -> float:
    """Fixed epsilon, or the auto schedule ``auto_coeff / sqrt(T)`` capped
    below 1 so short horizons stay valid."""
    if cfg.space.epsilon != "auto":
        return float(cfg.space.epsilon)
    horizon = max(horizon, 1)
    return min(cfg.space.auto_coeff / horizon**0.5, AUTO_EPSILON_CEILING)


def resolve_grid_params(cfg: ExperimentConfig, instance: MarketInstance, epsilon: float):
    from .grids import GridParams

    return GridParams(
        epsilon=epsilon,
        m=instance.m,
        n_total=instance.n_total,
        smoothness=instance.smoothness,
        diminishing=instance.diminishing,
    )
