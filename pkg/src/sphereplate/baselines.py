"""Comparison curves: parallel plates, proximity force, roughness, power laws.

Lengths are in nm and energies in eV; ``HBAR_C_EV_NM`` is the only
conversion constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .coupling import SpherePlateGeometry
from .physics import HBAR_C_EV_NM
from .spectrum import interaction_energy, solve_spectrum

BASELINE_KINDS = (
    "pt_perfect_conductor", "pt_from_plate_energy", "plate_casimir", "roughness_corrected",
    "power_law_ref", "dipole_truncation", "quadrupole_truncation",
)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class BaselineCurve:
    kind: str
    z: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")


def casimir_plate_energy(z: float) -> float:
    """Ideal-conductor plate energy per area, eV/nm^2, ``-pi^2 hbar c / (720 z^3)``."""
    return -(math.pi ** 2) * HBAR_C_EV_NM / 720.0 / z ** 3


def pt_force(z: float, R1: float, R2: float | None = None,
             plate_energy: Callable[[float], float] = casimir_plate_energy) -> float:
    """Proximity-theorem force ``2 pi R_eff V(z)`` in eV/nm.

    ``R2=None`` is the sphere/plate limit (``R_eff = R1``).
    """
    if not R1 > 0 or (R2 is not None and not R2 > 0):
        raise ValueError("radii must be > 0")
    r_eff = R1 if R2 is None else R1 * R2 / (R1 + R2)
    return 2.0 * math.pi * r_eff * plate_energy(z)


def pt_force_perfect_conductor(z: float, R: float) -> float:
    return -(math.pi ** 3) * HBAR_C_EV_NM * R / (360.0 * z ** 3)


def roughness_multiplier(z: float, A_r: float) -> float:
    """``1 + 6 (A_r/z)^2 + 15 (A_r/z)^4``."""
    if not z > 0 or A_r < 0:
        raise ValueError("need z > 0 and A_r >= 0")
    r2 = (A_r / z) ** 2
    return 1.0 + 6.0 * r2 + 15.0 * r2 * r2


def _plasmon_integrand(t: float) -> float:
    if t == 0.0:
        return 0.0
    q = math.exp(-t)
    lo = math.sqrt(-math.expm1(-t) / 2.0)
    hi = math.sqrt((1.0 + q) / 2.0)
    # hi + lo - sqrt(2) loses digits at large t; use the series there
    if t > 30.0:
        return -t * math.sqrt(2.0) * q * q / 8.0
    return t * (hi + lo - math.sqrt(2.0))


def _reflection_integrand(t: float, y: float) -> float:
    r = 1.0 / (1.0 + 2.0 * y * y)
    return t * math.log1p(-r * r * math.exp(-2.0 * t))


def plate_plate_nonretarded_energy(z: float, omega_p: float, route: str = "modes",
                                   epsrel: float = 1e-12) -> float:
    """Non-retarded energy per area (eV/nm^2) of two Drude half-spaces a gap ``z`` apart.

    ``route="modes"`` sums the zero-point energy of the coupled surface
    plasmons ``omega_p sqrt((1 +- exp(-k z)) / 2)`` over the wavevector plane;
    ``route="imaginary"`` integrates ``ln(1 - r^2 exp(-2kz))`` over imaginary
    frequency and wavevector. The two agree analytically.
    """
    if not z > 0:
        raise ValueError("z must be > 0")
    if route == "modes":
        val, err = integrate.quad(_plasmon_integrand, 0.0, math.inf, epsabs=0.0,
                                  epsrel=epsrel, limit=400)
        pref = omega_p / (4.0 * math.pi)
    elif route == "imaginary":
        inner = lambda y: integrate.quad(_reflection_integrand, 0.0, math.inf, args=(y,),
                                         epsabs=0.0, epsrel=epsrel, limit=400)[0]
        val, err = integrate.quad(inner, 0.0, math.inf, epsabs=0.0, epsrel=epsrel, limit=400)
        pref = omega_p / (4.0 * math.pi ** 2)
    else:
        raise ValueError(f"unknown route {route!r}")
    if not abs(err) <= 1e3 * epsrel * abs(val):
        raise QuadratureError(f"{route} quadrature error estimate {err!r} for value {val!r}")
    return pref * val / (z * z)


def power_law_reference(exponent: float, anchor_z: float, anchor_value: float):
    """Curve ``c z^p`` through ``(anchor_z, anchor_value)``."""
    if anchor_value == 0 or not anchor_z > 0:
        raise ValueError("anchor must be nonzero with positive abscissa")
    c = anchor_value / anchor_z ** exponent

    def curve(z):
        return c * np.asarray(z, dtype=float) ** exponent

    return curve


def truncated_energy(geom: SpherePlateGeometry, f_c: float, L: int) -> float:
    """Energy (hbar omega_p) with multipoles up to order ``L`` only."""
    return interaction_energy(solve_spectrum(geom, f_c, L))


def dipole_energy(geom: SpherePlateGeometry, f_c: float) -> float:
    return truncated_energy(geom, f_c, 1)


def quadrupole_energy(geom: SpherePlateGeometry, f_c: float) -> float:
    return truncated_energy(geom, f_c, 2)
