"""Material response: Drude and constant dielectric functions.

All frequencies are measured in units of the sphere's plasma frequency;
conversion to eV happens only where results leave the package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

HBAR_C_EV_NM = 197.327


class ModeCollapseError(ValueError):
    """A depolarization eigenvalue left (0, 1): no physical mode frequency."""


class OverdampedModeError(ValueError):
    """Damping exceeds the mode's restoring term; the root is purely imaginary."""


class ResonanceError(ZeroDivisionError):
    """Evaluation exactly on a polarizability pole."""


@dataclass(frozen=True)
class DielectricModel:
    """Drude metal or frequency-independent dielectric.

    ``eps_const = math.inf`` denotes a perfect conductor.
    """

    kind: str
    omega_p: float | None = None  # eV
    inv_tau_wp: float = 0.0
    eps_const: float | None = None

    def __post_init__(self):
        if self.kind == "drude":
            if self.omega_p is None or not self.omega_p > 0:
                raise ValueError(f"Drude model needs omega_p > 0, got {self.omega_p}")
            if not self.inv_tau_wp >= 0:
                raise ValueError(f"inv_tau_wp must be >= 0, got {self.inv_tau_wp}")
        elif self.kind == "constant":
            if self.eps_const is None or math.isnan(self.eps_const):
                raise ValueError("constant model needs eps_const")
        else:
            raise ValueError(f"unknown dielectric kind {self.kind!r}")

    @classmethod
    def drude(cls, omega_p: float, inv_tau_wp: float = 0.0) -> "DielectricModel":
        return cls("drude", omega_p=float(omega_p), inv_tau_wp=float(inv_tau_wp))

    @classmethod
    def constant(cls, eps: float) -> "DielectricModel":
        return cls("constant", eps_const=float(eps))

    @classmethod
    def perfect_conductor(cls) -> "DielectricModel":
        return cls("constant", eps_const=math.inf)

    @property
    def is_perfect_conductor(self) -> bool:
        return self.kind == "constant" and math.isinf(self.eps_const)

    def epsilon(self, omega: float = 0.0) -> complex:
        """Dielectric function at ``omega`` (units of omega_p for Drude)."""
        if self.kind == "constant":
            return complex(self.eps_const)
        return 1.0 - 1.0 / complex(spectral_u(self, omega, lossless=False))


def contrast_factor(substrate: DielectricModel) -> float:
    """Image strength ``(1 - eps) / (1 + eps)`` of a real, constant substrate."""
    if substrate.kind != "constant":
        raise ValueError("frequency-dependent substrates are not supported; "
                         "use a constant dielectric or a perfect conductor")
    eps = substrate.eps_const
    if math.isinf(eps):
        return -1.0
    if eps < 1.0:
        raise ValueError(f"substrate eps must be >= 1 (attractive regime), got {eps}")
    return (1.0 - eps) / (1.0 + eps)


def spectral_u(model: DielectricModel, omega: float, lossless: bool = True) -> complex | float:
    """Spectral variable ``u = 1 / (1 - eps)`` of a Drude sphere.

    ``omega`` is in units of omega_p. In lossless mode the damping term is
    dropped and a real number is returned.
    """
    if model.kind != "drude":
        raise ValueError("spectral_u is defined for Drude spheres only")
    if lossless:
        return omega * omega
    return omega * (omega + 1j * model.inv_tau_wp)


def omega_of_eigenvalue(model: DielectricModel, n: float, lossless: bool = True) -> float:
    """Mode frequency (units of omega_p) solving ``u(omega) = n``.

    With damping this is the real part of the root of
    ``w**2 + i*g*w - n = 0`` that has positive real part.
    """
    if not n > 0.0:
        raise ModeCollapseError(f"eigenvalue {n!r} <= 0: mode collapse")
    if lossless:
        return math.sqrt(n)
    quarter = 0.25 * model.inv_tau_wp ** 2
    if n <= quarter:
        raise OverdampedModeError(
            f"eigenvalue {n!r} <= (inv_tau_wp/2)**2 = {quarter!r}: overdamped mode")
    return math.sqrt(n - quarter)


def depolarization(l: int) -> float:
    """Isolated-sphere eigenvalue ``l / (2l + 1)``."""
    return l / (2.0 * l + 1.0)


def polarizability_from_eps(eps: complex, l: int, R: float) -> complex:
    """Multipole polarizability written with the dielectric function."""
    if l < 1:
        raise ValueError("l must be >= 1")
    num = l * (eps - 1.0)
    den = l * (eps + 1.0) + 1.0
    if den == 0:
        raise ResonanceError(f"on resonance for l={l}")
    return num / den * R ** (2 * l + 1)


def sphere_polarizability(model: DielectricModel, l: int, R: float, omega: float,
                          lossless: bool = False) -> complex:
    """Multipole polarizability ``n0 / (n0 - u) * R**(2l+1)``.

    Material and geometry separate: ``u`` carries the Drude response and the
    poles sit at ``u = l / (2l + 1)``.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if not R > 0:
        raise ValueError("R must be > 0")
    n0 = depolarization(l)
    u = spectral_u(model, omega, lossless=lossless)
    den = n0 - u
    if den == 0:
        raise ResonanceError(f"on resonance: u == {n0} for l={l}")
    return n0 / den * R ** (2 * l + 1)


def drude_root(model: DielectricModel, n: float) -> complex:
    """Complex root of ``w**2 + i*g*w - n = 0`` with positive real part."""
    g = model.inv_tau_wp
    return (-1j * g + cmath.sqrt(4.0 * n - g * g)) / 2.0
