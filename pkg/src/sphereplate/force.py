"""Dispersive force from the mode spectrum, and local power-law exponents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coupling import build_block, block_z_derivative
from .physics import ModeCollapseError
from .spectrum import ModeSpectrum


@dataclass
class CurveSample:
    z_over_R: float
    z_nm: float
    truncation: str
    L_used: int
    energy_hbar_wp: float
    energy_eV: float
    force_eV_per_nm: float
    force_method: str
    slope_local: float = math.nan
    status: str = "ok"
    extras: dict = field(default_factory=dict)


def force_hellmann_feynman(spec: ModeSpectrum) -> float:
    """Force ``-dE/dz`` in hbar*omega_p per nm from eigenvector expectation values.

    dE/dz = 1/4 sum_modes n^(-1/2) v^T (dH/dz) v
    """
    if not spec.has_vectors:
        raise ValueError("Hellmann-Feynman force needs eigenvectors for every block")
    if not spec.valid:
        raise ModeCollapseError("eigenvalue outside (0, 1)")
    geom = spec.geom
    terms: list[float] = []
    for b in spec.blocks:
        block = build_block(b.m, spec.L, geom, spec.f_c)
        dH = block_z_derivative(block, geom)
        V = b.vectors
        dn = np.einsum("ij,ij->j", V, dH @ V)
        terms.extend((dn / np.sqrt(b.values)).tolist() * b.degeneracy)
    return -0.25 * math.fsum(terms)


def force_finite_difference(energy_fn: Callable[[float], float], z: float,
                            h_rel: float = 1e-4) -> float:
    """Central difference ``-(E(z+h) - E(z-h)) / 2h`` with ``h = h_rel * z``."""
    if not z > 0:
        raise ValueError("z must be > 0")
    if not 0 < h_rel <= 1e-2:
        raise ValueError("h_rel must lie in (0, 1e-2]")
    h = h_rel * z
    return -(energy_fn(z + h) - energy_fn(z - h)) / (2.0 * h)


def local_slope(z, energy) -> np.ndarray:
    """Centred log-log slope ``d ln|E| / d ln z``; NaN at the ends and where E == 0."""
    z = np.asarray(z, dtype=float)
    e = np.abs(np.asarray(energy, dtype=float))
    out = np.full(z.shape, np.nan)
    if z.size < 3:
        return out
    with np.errstate(divide="ignore", invalid="ignore"):
        le = np.log(e)
        lz = np.log(z)
        s = (le[2:] - le[:-2]) / (lz[2:] - lz[:-2])
    bad = (e[2:] == 0) | (e[:-2] == 0) | ~np.isfinite(s)
    s[bad] = np.nan
    out[1:-1] = s
    return out
