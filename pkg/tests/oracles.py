"""Independent oracles shared by the unit and acceptance tests."""

import math

import mpmath
import numpy as np
from scipy.special import sph_harm_y


def translation_by_projection(l, lp, m, d=1.0, r0=0.5, n_theta=64, n_phi=64):
    """Regular-expansion coefficient of an irregular solid harmonic centred at (0,0,-d).

    The potential r'^-(lp+1) Y_lp^m is sampled on a sphere of radius r0 about
    the origin and projected onto Y_l^m; returns the coefficient scaled to d = 1.
    """
    ct, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    CT, PH = np.meshgrid(ct, phi, indexing="ij")
    th = np.arccos(CT)
    X = r0 * np.sin(th) * np.cos(PH)
    Y = r0 * np.sin(th) * np.sin(PH)
    Z = r0 * CT + d
    ra = np.sqrt(X * X + Y * Y + Z * Z)
    pot = ra ** (-(lp + 1)) * sph_harm_y(lp, m, np.arccos(Z / ra), np.arctan2(Y, X))
    proj = np.sum(w[:, None] * (2.0 * np.pi / n_phi) * pot * np.conj(sph_harm_y(l, m, th, PH)))
    return (proj * d ** (l + lp + 1) / r0 ** l).real


def oracle_coefficient(l, lp, m, x, f_c):
    # image of order lp carries parity (-1)^(lp+m); both orders are normalized by sqrt(n0)
    t = translation_by_projection(l, lp, m)
    n0, n0p = l / (2 * l + 1), lp / (2 * lp + 1)
    return (f_c * (-1) ** (lp + m) * t * math.sqrt(n0 * n0p)
            * math.sqrt((2 * l + 1) / (2 * lp + 1)) * x ** (l + lp + 1))


def image_dipole_energy(orientation, f_c, p=1.0, d=1.0):
    """Dipole/image-dipole energy at centre separation d (half the pair energy)."""
    pvec = np.array([0.0, 0.0, p]) if orientation == "perp" else np.array([p, 0.0, 0.0])
    image = np.array([f_c * pvec[0], f_c * pvec[1], -f_c * pvec[2]])
    n = np.array([0.0, 0.0, 1.0])
    return (pvec @ image - 3.0 * (pvec @ n) * (image @ n)) / d ** 3


def charpoly_roots(a: np.ndarray, dps: int = 60) -> list[float]:
    """Eigenvalues as roots of the characteristic polynomial (Faddeev-LeVerrier, high precision)."""
    with mpmath.workdps(dps):
        A = mpmath.matrix(a.tolist())
        n = A.rows
        M = mpmath.zeros(n)
        coeffs = [mpmath.mpf(1)]
        for k in range(1, n + 1):
            M = A * M + coeffs[-1] * mpmath.eye(n)
            AM = A * M
            c = -sum(AM[i, i] for i in range(n)) / k
            coeffs.append(c)
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        return sorted(float(mpmath.re(r)) for r in roots)
