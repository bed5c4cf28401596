"""Run configuration: flat ``key = value`` files with command-line overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .physics import DielectricModel

TRUNCATIONS = ("1", "2", "full")
FORCE_METHODS = ("hf", "fd", "both")
BASELINE_FLAGS = ("pt_ideal", "pt_nonretarded", "roughness")


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


@dataclass
class RunConfig:
    eps_substrate: float | None = None  # math.inf for a perfect conductor
    omega_p_eV: float = 15.80
    inv_tau_wp: float = 0.04
    R_nm: float = 50.0
    z_over_R_min: float = 0.1
    z_over_R_max: float = 100.0
    points: int = 20
    log_spaced: bool = True
    z_over_R_list: list[float] | None = None
    L_policy: str = "auto"
    rel_tol: float = 1e-6
    L_start: int = 4
    L_step: int = 4
    L_cap: int = 2000
    truncations: list[str] = field(default_factory=lambda: ["1", "2", "full"])
    force_method: str = "hf"
    h_rel: float = 1e-4
    baselines: list[str] = field(default_factory=list)
    roughness_A_r_nm: float = 0.0
    report_damped: bool = False
    out_dir: str = "results"
    figures: bool = True
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.eps_substrate is None:
            raise ConfigError("eps_substrate is required (number or perfect_conductor)")
        if not (math.isinf(self.eps_substrate) or self.eps_substrate >= 1.0):
            raise ConfigError("eps_substrate must be >= 1 or perfect_conductor")
        if not self.omega_p_eV > 0 or self.inv_tau_wp < 0 or not self.R_nm > 0:
            raise ConfigError("need omega_p_eV > 0, inv_tau_wp >= 0, R_nm > 0")
        if self.z_over_R_list is None:
            if self.points < 1:
                raise ConfigError("points must be >= 1")
            if not 0 < self.z_over_R_min <= self.z_over_R_max:
                raise ConfigError("need 0 < z_over_R_min <= z_over_R_max")
        elif any(not v > 0 for v in self.z_over_R_list):
            raise ConfigError("z_over_R values must be > 0")
        if self.L_policy != "auto":
            try:
                if int(self.L_policy) < 1:
                    raise ValueError
            except ValueError:
                raise ConfigError(f"L_policy must be 'auto' or a positive integer, "
                                  f"got {self.L_policy!r}") from None
        if not self.rel_tol > 0 or self.L_start < 1 or self.L_step < 1:
            raise ConfigError("need rel_tol > 0, L_start >= 1, L_step >= 1")
        if self.L_cap < self.L_start:
            raise ConfigError("L_cap must be >= L_start")
        bad = [t for t in self.truncations if t not in TRUNCATIONS]
        if bad or not self.truncations:
            raise ConfigError(f"truncations must be a non-empty subset of {TRUNCATIONS}")
        if self.force_method not in FORCE_METHODS:
            raise ConfigError(f"force_method must be one of {FORCE_METHODS}")
        if not 0 < self.h_rel <= 1e-2:
            raise ConfigError("h_rel must lie in (0, 1e-2]")
        bad = [b for b in self.baselines if b not in BASELINE_FLAGS]
        if bad:
            raise ConfigError(f"unknown baselines {bad}; choose from {BASELINE_FLAGS}")
        if self.roughness_A_r_nm < 0 or self.workers < 1:
            raise ConfigError("need roughness_A_r_nm >= 0 and workers >= 1")
        return self

    @property
    def sphere(self) -> DielectricModel:
        return DielectricModel.drude(self.omega_p_eV, self.inv_tau_wp)

    @property
    def substrate(self) -> DielectricModel:
        return DielectricModel.constant(self.eps_substrate)

    def z_over_R_values(self) -> list[float]:
        if self.z_over_R_list is not None:
            return [float(v) for v in self.z_over_R_list]
        if self.points == 1:
            return [float(self.z_over_R_min)]
        if self.log_spaced:
            grid = np.geomspace(self.z_over_R_min, self.z_over_R_max, self.points)
        else:
            grid = np.linspace(self.z_over_R_min, self.z_over_R_max, self.points)
        return [float(v) for v in grid]

    # --- serialization ---------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format(f.name, value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (p.strip() for p in line.split("=", 1))
            cfg.set(key, value)
        return cfg

    def set(self, key: str, value: str) -> None:
        """Assign a field from its text form; ``key`` may be snake_case or kebab-case."""
        name = key.replace("-", "_")
        names = {f.name: f for f in fields(self)}
        if name not in names:
            # flags are case-insensitive (--r-nm, --omega-p-ev)
            lowered = {n.lower(): n for n in names}
            if name.lower() not in lowered:
                raise ConfigError(f"unknown config key {key!r}")
            name = lowered[name.lower()]
        try:
            setattr(self, name, _parse(name, value))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}: {value!r} ({exc})") from None


_FLOATS = {"omega_p_eV", "inv_tau_wp", "R_nm", "z_over_R_min", "z_over_R_max", "rel_tol",
           "h_rel", "roughness_A_r_nm"}
_INTS = {"points", "L_start", "L_step", "L_cap", "workers"}
_BOOLS = {"log_spaced", "report_damped", "figures"}
_LISTS = {"truncations", "baselines"}


def _parse(name: str, text: str):
    text = text.strip()
    if name == "eps_substrate":
        if text.lower() in ("perfect_conductor", "inf"):
            return math.inf
        return float(text)
    if name == "z_over_R_list":
        return [float(v) for v in _list(text)]
    if name in _FLOATS:
        return float(text)
    if name in _INTS:
        return int(text)
    if name in _BOOLS:
        return _bool(text)
    if name in _LISTS:
        return _list(text)
    return text


def _format(name: str, value) -> str:
    if name == "eps_substrate" and math.isinf(value):
        return "perfect_conductor"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return str(value)
