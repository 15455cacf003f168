"""Scenario configuration: a single JSON document validated into a frozen
ScenarioConfig with defaults, rejecting unknown keys."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .integrate import METHODS
from .sampling import HAMILTONIAN_MODES, INIT_MODES


class ConfigError(ValueError):
    """Malformed, out-of-range, or unknown configuration input."""


@dataclass(frozen=True)
class ScenarioConfig:
    d: int
    n: int
    kappa: float
    t_end: float
    dt: float
    p_reference: int | None = None
    method: str = "cf2"
    record_every: int = 10
    retract_every: int = 64
    hamiltonian_mode: str = "gaussian"
    sigma: float = 1.0
    init_mode: str = "haar"
    cluster_radius: float = 0.5
    seed: int = 0
    repetitions: int = 1
    n_list: tuple | None = None
    kappa_list: tuple | None = None
    alpha: float | None = None

    def __post_init__(self):
        _require(self.d >= 1, "d", "must be >= 1")
        _require(self.n >= 1, "n", "must be >= 1")
        _require(self.kappa >= 0, "kappa", "must be nonnegative")
        _require(self.dt > 0, "dt", "must be positive")
        _require(self.t_end >= self.dt, "t_end", "must be at least dt")
        steps = round(self.t_end / self.dt)
        _require(abs(steps * self.dt - self.t_end) <= 1e-8 * max(1.0, self.t_end),
                 "t_end", "must be an integer multiple of dt")
        _require(self.method in METHODS, "method", f"must be one of {METHODS}")
        _require(self.record_every >= 1, "record_every", "must be >= 1")
        _require(self.retract_every >= 1, "retract_every", "must be >= 1")
        _require(self.hamiltonian_mode in HAMILTONIAN_MODES,
                 "hamiltonian_mode", f"must be one of {HAMILTONIAN_MODES}")
        _require(self.sigma > 0, "sigma", "must be positive")
        _require(self.init_mode in INIT_MODES, "init_mode", f"must be one of {INIT_MODES}")
        _require(self.cluster_radius > 0, "cluster_radius", "must be positive")
        _require(0 <= self.seed < 2 ** 64, "seed", "must be an unsigned 64-bit integer")
        _require(self.repetitions >= 1, "repetitions", "must be >= 1")
        if self.p_reference is not None:
            _require(self.p_reference >= 1, "p_reference", "must be >= 1")
        if self.n_list is not None:
            object.__setattr__(self, "n_list", tuple(int(v) for v in self.n_list))
            _require(len(self.n_list) >= 1, "n_list", "must be nonempty")
            _require(all(v >= 1 for v in self.n_list), "n_list", "entries must be >= 1")
            _require(all(b > a for a, b in zip(self.n_list, self.n_list[1:])),
                     "n_list", "must be strictly increasing")
        if self.kappa_list is not None:
            object.__setattr__(self, "kappa_list", tuple(float(v) for v in self.kappa_list))
            _require(len(self.kappa_list) >= 1, "kappa_list", "must be nonempty")
            _require(all(v > 0 for v in self.kappa_list), "kappa_list",
                     "entries must be positive")
        if self.alpha is not None:
            _require(self.alpha > 0, "alpha", "must be positive")

    def resolved(self) -> dict:
        """Normalized plain-dict form (used for manifests and round-trips);
        unset optional fields are omitted."""
        out = {k: v for k, v in asdict(self).items() if v is not None}
        for key in ("n_list", "kappa_list"):
            if key in out:
                out[key] = list(out[key])
        return out

    def to_json(self) -> str:
        return json.dumps(self.resolved(), sort_keys=True, indent=2) + "\n"


def _require(cond: bool, key: str, message: str):
    if not cond:
        raise ConfigError(f"config key {key!r} {message}")


_INT_KEYS = {"d", "n", "p_reference", "record_every", "retract_every", "seed",
             "repetitions"}
_FLOAT_KEYS = {"kappa", "t_end", "dt", "sigma", "cluster_radius", "alpha"}
_STR_KEYS = {"method", "hamiltonian_mode", "init_mode"}
_LIST_KEYS = {"n_list", "kappa_list"}


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    known = {f.name for f in fields(ScenarioConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    coerced = {}
    for key, value in data.items():
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"config key {key!r} must be an integer")
            coerced[key] = value
        elif key in _FLOAT_KEYS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"config key {key!r} must be a number")
            coerced[key] = float(value)
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"config key {key!r} must be a string")
            coerced[key] = value.lower()
        elif key in _LIST_KEYS:
            if not isinstance(value, list):
                raise ConfigError(f"config key {key!r} must be a list")
            coerced[key] = tuple(value)
    missing = [k for k in ("d", "n", "kappa", "t_end", "dt") if k not in coerced]
    if missing:
        raise ConfigError(f"missing required config keys: {missing}")
    return ScenarioConfig(**coerced)
