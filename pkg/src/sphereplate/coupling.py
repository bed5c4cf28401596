"""Sphere/image multipole coupling in m-conserving blocks.

Entries are built in log space: ``(l + l')!`` overflows a double long
before the full coefficient stops being O(1) near contact. Low orders
use the exact binomial form instead, so simple ratios between entries
(the 2:1 of the dipole block) hold to the last bit.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TextIO

import numpy as np

from .physics import depolarization

# exp(LOG_FLUSH) ~ 1e-300; smaller entries are set to zero
LOG_FLUSH = math.log(1e-300)
# l + l' up to this value: the squared prefactor is an exact ratio of integers below 2**53
EXACT_ORDER_SUM = 24


@dataclass(frozen=True)
class SpherePlateGeometry:
    """Sphere of radius ``R`` with its lowest point a gap ``z`` above the plate (nm)."""

    R: float
    z: float

    def __post_init__(self):
        if not (self.R > 0 and self.z > 0):
            raise ValueError(f"need R > 0 and z > 0, got R={self.R}, z={self.z}")

    @classmethod
    def from_ratio(cls, z_over_R: float, R: float = 1.0) -> "SpherePlateGeometry":
        return cls(R=float(R), z=float(z_over_R) * float(R))

    @property
    def d(self) -> float:
        """Distance from the sphere centre to its image centre."""
        return 2.0 * (self.z + self.R)

    @property
    def x(self) -> float:
        return self.R / (2.0 * (self.z + self.R))

    @property
    def z_over_R(self) -> float:
        return self.z / self.R


class _LogFactorials:
    """Grow-only table of ln(k!), shared read-only between threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self.table = np.zeros(2)

    def upto(self, n: int) -> np.ndarray:
        table = self.table
        if n < table.size:
            return table
        with self._lock:
            if n >= self.table.size:
                size = max(n + 1, 2 * self.table.size)
                self.table = np.array([math.lgamma(k + 1.0) for k in range(size)])
            return self.table


log_factorials = _LogFactorials()


@lru_cache(maxsize=None)
def _exact_prefactor(l: int, lp: int, m: int) -> float:
    # (l+l')!^2 / ((l+m)!(l-m)!(l'+m)!(l'-m)!) = C(l+l', l+m) C(l+l', l-m)
    n = l + lp
    num = l * lp * math.comb(n, l + m) * math.comb(n, l - m)
    return math.sqrt(num / ((2 * l + 1) * (2 * lp + 1)))


def _exact_magnitude(l: int, lp: int, m: int, x: float) -> float:
    return _exact_prefactor(l, lp, m) * math.pow(x, l + lp + 1)


def coupling_coefficient(l: int, lp: int, m: int, x: float, f_c: float) -> float:
    """Coupling between sphere multipole ``(l, m)`` and image multipole ``(lp, m)``.

    f_c (-1)^(l+lp) sqrt(l lp / ((2l+1)(2lp+1))) (l+lp)! / sqrt((l+m)!(l-m)!(lp+m)!(lp-m)!) x^(l+lp+1)
    """
    m = abs(m)
    if min(l, lp) < max(1, m):
        raise ValueError(f"need l, l' >= max(1, |m|); got l={l}, l'={lp}, m={m}")
    if not 0.0 < x < 0.5:
        raise ValueError(f"x must lie in (0, 1/2), got {x}")
    if f_c == 0.0:
        return 0.0
    l, lp = min(l, lp), max(l, lp)  # same operation order as the block's upper triangle
    sign = -1.0 if (l + lp) % 2 else 1.0
    if l + lp <= EXACT_ORDER_SUM:
        return f_c * sign * _exact_magnitude(l, lp, m, x)
    lf = log_factorials.upto(l + lp)
    log_mag = (lf[l + lp] - 0.5 * (lf[l + m] + lf[l - m] + lf[lp + m] + lf[lp - m])
               + (l + lp + 1) * math.log(x)
               + 0.5 * math.log(l * lp / ((2.0 * l + 1.0) * (2.0 * lp + 1.0))))
    if log_mag < LOG_FLUSH:
        return 0.0
    return f_c * sign * math.exp(log_mag)


@dataclass(frozen=True)
class CouplingBlock:
    """Symmetric m-block of the interaction matrix, orders ``l_min..L``."""

    m: int
    L: int
    x: float
    f_c: float
    entries: np.ndarray
    coupling: np.ndarray = field(repr=False)

    @property
    def l_min(self) -> int:
        return max(1, self.m)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.l_min, self.L + 1)

    @property
    def reference(self) -> np.ndarray:
        """Isolated-sphere eigenvalues ``l / (2l + 1)`` of this block, ascending."""
        l = self.orders
        return l / (2.0 * l + 1.0)

    @property
    def size(self) -> int:
        return self.L - self.l_min + 1


def _coupling_matrix(m: int, L: int, x: float, f_c: float) -> np.ndarray:
    l_min = max(1, m)
    l = np.arange(l_min, L + 1)
    n = l.size
    if f_c == 0.0:
        return np.zeros((n, n))
    lf = log_factorials.upto(2 * L)
    half = 0.5 * (lf[l + m] + lf[l - m])
    norm = 0.5 * np.log(l / (2.0 * l + 1.0))
    ls = l[:, None] + l[None, :]
    log_mag = (lf[ls] - half[:, None] - half[None, :] + (ls + 1) * math.log(x)
               + norm[:, None] + norm[None, :])
    sign = np.where(ls % 2, -1.0, 1.0)
    with np.errstate(under="ignore"):
        mag = np.where(log_mag < LOG_FLUSH, 0.0, np.exp(np.maximum(log_mag, LOG_FLUSH)))
    for i, j in zip(*np.nonzero(ls <= EXACT_ORDER_SUM)):
        mag[i, j] = _exact_magnitude(int(l[i]), int(l[j]), m, x)
    c = f_c * sign * mag
    # mirror the upper triangle so the block is symmetric bit for bit
    upper = np.triu(c)
    return upper + np.triu(c, 1).T


def build_block(m: int, L: int, geom: SpherePlateGeometry, f_c: float) -> CouplingBlock:
    """Interaction matrix block for azimuthal order ``|m|`` truncated at ``L``."""
    m = abs(int(m))
    L = int(L)
    if L < 1 or m > L:
        raise ValueError(f"need 0 <= |m| <= L and L >= 1, got m={m}, L={L}")
    x = geom.x
    coupling = _coupling_matrix(m, L, x, f_c)
    l = np.arange(max(1, m), L + 1)
    entries = coupling + np.diag(l / (2.0 * l + 1.0))
    return CouplingBlock(m=m, L=L, x=x, f_c=f_c, entries=entries, coupling=coupling)


def block_z_derivative(block: CouplingBlock, geom: SpherePlateGeometry) -> np.ndarray:
    """Analytic derivative of the block with respect to the gap ``z`` (per nm)."""
    l = block.orders
    power = (l[:, None] + l[None, :] + 1).astype(float)
    return -power / (geom.z + geom.R) * block.coupling


def dump_block(block: CouplingBlock, stream: TextIO) -> None:
    """Write the block row-major, 17 significant digits, one row per line."""
    stream.write(f"# m={block.m} L={block.L} l_min={block.l_min} x={block.x!r} "
                 f"f_c={block.f_c!r}\n")
    for row in block.entries:
        stream.write(" ".join(f"{v:.16e}" for v in row))
        stream.write("\n")


def mode_count(L: int) -> int:
    """Number of modes with orders 1..L counting both signs of m."""
    return L * L + 2 * L


__all__ = ["SpherePlateGeometry", "CouplingBlock", "coupling_coefficient", "build_block",
           "block_z_derivative", "dump_block", "mode_count", "depolarization"]
