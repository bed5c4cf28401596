"""Dense symmetric eigensolver: Householder tridiagonalization + implicit QL.

The reduction is done in panels: reflectors for ``PANEL`` columns are
generated against the un-updated trailing matrix and the accumulated
rank-2k update is applied once per panel as a matrix product. Below
``BLAS_MIN_SIZE`` the panel loop runs in numba; above it the per-column
matrix-vector products go through numpy, which is what keeps the large-L
sweeps near contact tractable. Either way the tridiagonal problem is solved
by implicit-shift QL; the eigenvalues-only path never forms Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps
MAX_SWEEPS = 50
# above this size the panel steps run through numpy/BLAS instead of numba loops
BLAS_MIN_SIZE = 384
PANEL = 32


class EigenConvergenceError(RuntimeError):
    """Raised when implicit QL exceeds the per-eigenvalue iteration cap."""


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray | None = None


@njit(cache=True, nogil=True, fastmath=True)
def _symv_rows(a, v, y, k):
    n = a.shape[0]
    for j in range(k, n):
        s = 0.0
        for r in range(k, n):
            s += a[j, r] * v[r]
        y[j] = s


@njit(cache=True, nogil=True)
def _tridiagonalize_panel(a, d, e, tau, nb):
    """Reduce symmetric ``a`` (overwritten) to tridiagonal form, ``nb`` columns per panel.

    On exit ``d`` holds the diagonal, ``e[0:n-1]`` the sub-diagonal, and the
    reflector for column ``k`` sits in ``a[k+1:, k]`` (leading entry 1) with
    scale ``tau[k]``. Inside a panel the trailing matrix is left untouched
    and the pending rank-2k update is applied once at the panel's end.
    """
    n = a.shape[0]
    if n == 1:
        d[0] = a[0, 0]
        tau[0] = 0.0
        return
    V = np.zeros((n, nb))
    W = np.zeros((n, nb))
    v = np.zeros(n)
    y = np.zeros(n)
    cv = np.zeros(nb)
    cw = np.zeros(nb)
    for k in range(n):
        tau[k] = 0.0
    for j0 in range(0, n - 2, nb):
        jb = min(nb, n - 2 - j0)
        for r in range(j0, n):
            for q in range(nb):
                V[r, q] = 0.0
                W[r, q] = 0.0
        for i in range(jb):
            c = j0 + i
            if i > 0:
                for r in range(c, n):
                    s = 0.0
                    for q in range(i):
                        s += V[r, q] * W[c, q] + W[r, q] * V[c, q]
                    a[r, c] -= s
            d[c] = a[c, c]
            alpha = a[c + 1, c]
            # scaled norm: squares of tiny couplings would otherwise underflow
            big = 0.0
            for r in range(c + 2, n):
                big = max(big, abs(a[r, c]))
            if big == 0.0:
                e[c] = alpha
                a[c + 1, c] = 1.0
                continue
            big = max(big, abs(alpha))
            sigma = 0.0
            for r in range(c + 2, n):
                q = a[r, c] / big
                sigma += q * q
            q = alpha / big
            beta = big * np.sqrt(q * q + sigma)
            if alpha > 0.0:
                beta = -beta
            t = (beta - alpha) / beta
            scale = 1.0 / (alpha - beta)
            tau[c] = t
            e[c] = beta
            v[c + 1] = 1.0
            a[c + 1, c] = 1.0
            for r in range(c + 2, n):
                a[r, c] *= scale
                v[r] = a[r, c]
            # y = A22 v with A22 untouched inside the panel (symmetric)
            _symv_rows(a, v, y, c + 1)
            if i > 0:
                for q in range(i):
                    sv = 0.0
                    sw = 0.0
                    for r in range(c + 1, n):
                        sv += V[r, q] * v[r]
                        sw += W[r, q] * v[r]
                    cv[q] = sv
                    cw[q] = sw
                for r in range(c + 1, n):
                    s = 0.0
                    for q in range(i):
                        s += V[r, q] * cw[q] + W[r, q] * cv[q]
                    y[r] -= s
            s = 0.0
            for r in range(c + 1, n):
                y[r] *= t
                s += y[r] * v[r]
            h = 0.5 * t * s
            for r in range(c + 1, n):
                y[r] -= h * v[r]
                V[r, i] = v[r]
                W[r, i] = y[r]
        s0 = j0 + jb
        Vs = np.ascontiguousarray(V[s0:, :jb])
        Ws = np.ascontiguousarray(W[s0:, :jb])
        M = np.dot(Vs, np.ascontiguousarray(Ws.T))
        M2 = np.dot(Ws, np.ascontiguousarray(Vs.T))
        m = n - s0
        for r in range(m):
            for j in range(m):
                a[s0 + r, s0 + j] -= M[r, j] + M2[r, j]
    d[n - 2] = a[n - 2, n - 2]
    d[n - 1] = a[n - 1, n - 1]
    e[n - 2] = a[n - 1, n - 2]


@njit(cache=True, nogil=True)
def _accumulate_transposed(a, tau, zt):
    """Form Q^T (rows are columns of Q) from the stored reflectors."""
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            zt[i, j] = 0.0
        zt[i, i] = 1.0
    v = np.empty(n)
    for k in range(n - 3, -1, -1):
        t = tau[k]
        if t == 0.0:
            continue
        for i in range(k + 1, n):
            v[i] = a[i, k]
        # Q <- H_k Q; row j of zt is column j of Q
        for j in range(k + 1, n):
            s = 0.0
            for i in range(k + 1, n):
                s += zt[j, i] * v[i]
            s *= t
            for i in range(k + 1, n):
                zt[j, i] -= s * v[i]


@njit(cache=True, nogil=True, inline="always")
def _hypot(a, b):
    # libm hypot is slow in the QL inner loop; square directly when that cannot over/underflow
    m = max(abs(a), abs(b))
    if 1e-150 < m < 1e150:
        return math.sqrt(a * a + b * b)
    return np.hypot(a, b)


@njit(cache=True, nogil=True)
def _implicit_ql(d, e, zt, want_vectors, max_sweeps):
    """Implicit-shift QL on the tridiagonal (d, e); returns 0 or failing index+1."""
    n = d.shape[0]
    if n == 1:
        return 0
    e[n - 1] = 0.0
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = _hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = _hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(n):
                        f2 = zt[i + 1, k]
                        zt[i + 1, k] = s * zt[i, k] + c * f2
                        zt[i, k] = c * zt[i, k] - s * f2
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


@njit(cache=True, nogil=True, inline="always")
def _eig2(a, b, c):
    """Eigenvalues of [[a, b], [b, c]] without cancellation in the smaller one."""
    sm = a + c
    adf = abs(a - c)
    ab = abs(2.0 * b)
    if abs(a) > abs(c):
        acmx, acmn = a, c
    else:
        acmx, acmn = c, a
    if adf > ab:
        rt = adf * math.sqrt(1.0 + (ab / adf) ** 2)
    elif adf < ab:
        rt = ab * math.sqrt(1.0 + (adf / ab) ** 2)
    else:
        rt = ab * math.sqrt(2.0)
    if sm == 0.0:
        return 0.5 * rt, -0.5 * rt
    rt1 = 0.5 * (sm - rt) if sm < 0.0 else 0.5 * (sm + rt)
    return rt1, (acmx / rt1) * acmn - (b / rt1) * b


@njit(cache=True, nogil=True)
def _root_free_ql(d, e, max_sweeps):
    """Eigenvalues only: Pal-Walker-Kahan QL working on squared off-diagonals.

    No square roots or rotations in the inner loop, which makes the
    quadratic stage cheap next to the cubic reduction.
    """
    n = d.shape[0]
    if n == 1:
        return 0
    # keep the squares inside the normal range
    anorm = 0.0
    for i in range(n):
        anorm = max(anorm, abs(d[i]))
    for i in range(n - 1):
        anorm = max(anorm, abs(e[i]))
    scale = 1.0
    if anorm > 1e100 or 0.0 < anorm < 1e-100:
        scale = 1.0 / anorm
        for i in range(n):
            d[i] *= scale
    for i in range(n - 1):
        e[i] = (e[i] * scale) ** 2
    e[n - 1] = 0.0
    eps2 = EPS * EPS
    l = 0
    while l < n:
        iters = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps2 * abs(d[m] * d[m + 1]):
                    break
                m += 1
            e[m] = 0.0
            if m == l:
                l += 1
                break
            if m == l + 1:
                d[l], d[l + 1] = _eig2(d[l], math.sqrt(e[l]), d[l + 1])
                e[l] = 0.0
                l += 2
                break
            iters += 1
            if iters > max_sweeps:
                return l + 1
            rte = math.sqrt(e[l])
            sigma = (d[l + 1] - d[l]) / (2.0 * rte)
            r = _hypot(sigma, 1.0)
            sigma = d[l] - rte / (sigma + math.copysign(r, sigma))
            c = 1.0
            s = 0.0
            gamma = d[m] - sigma
            p = gamma * gamma
            for i in range(m - 1, l - 1, -1):
                bb = e[i]
                r = p + bb
                if i != m - 1:
                    e[i + 1] = s * r
                oldc = c
                c = p / r
                s = bb / r
                oldgam = gamma
                alpha = d[i]
                gamma = c * (alpha - sigma) - s * oldgam
                d[i + 1] = oldgam + (alpha - gamma)
                if c != 0.0:
                    p = (gamma * gamma) / c
                else:
                    p = oldc * bb
            e[l] = s * p
            d[l] = sigma + gamma
    if scale != 1.0:
        for i in range(n):
            d[i] /= scale
    return 0


def _tridiagonalize_blocked(a, d, e, tau, nb=PANEL):
    """Panel Householder reduction; same storage conventions as the fused kernel."""
    n = a.shape[0]
    tau[:] = 0.0
    V = np.zeros((n, nb))
    W = np.zeros((n, nb))
    for j0 in range(0, n - 2, nb):
        jb = min(nb, n - 2 - j0)
        V[:] = 0.0
        W[:] = 0.0
        for i in range(jb):
            c = j0 + i
            if i:
                a[c:, c] -= V[c:, :i] @ W[c, :i] + W[c:, :i] @ V[c, :i]
            d[c] = a[c, c]
            x = a[c + 1:, c]
            alpha = x[0]
            big = np.max(np.abs(x[1:]))
            if big == 0.0:
                e[c] = alpha
                x[0] = 1.0
                continue
            big = max(big, abs(alpha))
            xs = x / big
            beta = -math.copysign(big * math.sqrt(xs @ xs), alpha)
            t = (beta - alpha) / beta
            x *= 1.0 / (alpha - beta)
            x[0] = 1.0
            e[c] = beta
            tau[c] = t
            v = x
            w = a[c + 1:, c + 1:] @ v
            if i:
                w -= V[c + 1:, :i] @ (W[c + 1:, :i].T @ v) + W[c + 1:, :i] @ (V[c + 1:, :i].T @ v)
            w *= t
            w -= (0.5 * t * (w @ v)) * v
            V[c + 1:, i] = v
            W[c + 1:, i] = w
        s = j0 + jb
        vs = V[s:, :jb]
        ws = W[s:, :jb]
        a[s:, s:] -= vs @ ws.T + ws @ vs.T
    d[n - 2] = a[n - 2, n - 2]
    d[n - 1] = a[n - 1, n - 1]
    e[n - 2] = a[n - 1, n - 2]


def _accumulate_blocked(a, tau, zt, nb=PANEL):
    """Form Q^T from stored reflectors with compact-WY panels (backward)."""
    n = a.shape[0]
    q = np.eye(n)
    nref = n - 2
    starts = list(range(0, nref, nb))
    for j0 in reversed(starts):
        jb = min(nb, nref - j0)
        r0 = j0 + 1
        V = a[r0:, j0:j0 + jb].copy()
        # column i holds its reflector from row i down; clear what lies above
        for i in range(jb):
            V[:i, i] = 0.0
        T = np.zeros((jb, jb))
        for i in range(jb):
            t = tau[j0 + i]
            T[i, i] = t
            if i and t != 0.0:
                T[:i, i] = -t * (T[:i, :i] @ (V[:, :i].T @ V[:, i]))
        q[r0:, :] -= V @ (T @ (V.T @ q[r0:, :]))
    zt[...] = q.T


class Workspace:
    """Reusable scratch buffers for repeated solves of size ``<= capacity``."""

    def __init__(self, capacity: int = 0):
        self._grow(max(int(capacity), 1))

    def _grow(self, n: int) -> None:
        self.capacity = n
        self._a = np.empty(n * n)
        self._z = np.empty(n * n)
        self.d = np.empty(n)
        self.e = np.empty(n)
        self.tau = np.empty(n)

    def views(self, n: int):
        if n > self.capacity:
            self._grow(n)
        return (self._a[: n * n].reshape(n, n), self._z[: n * n].reshape(n, n),
                self.d[:n], self.e[:n], self.tau[:n])


def eigenvalues(block, want_vectors: bool = False, workspace: Workspace | None = None,
                max_sweeps: int = MAX_SWEEPS) -> EigenResult:
    """All eigenvalues of a real symmetric matrix, ascending.

    With ``want_vectors`` the columns of ``EigenResult.vectors`` are the
    matching orthonormal eigenvectors. Only the lower triangle is read.
    """
    block = np.asarray(block, dtype=np.float64)
    n = block.shape[0]
    if block.ndim != 2 or block.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {block.shape}")
    if n == 0:
        return EigenResult(np.empty(0), np.empty((0, 0)) if want_vectors else None)
    ws = workspace if workspace is not None else Workspace(n)
    a, zt, d, e, tau = ws.views(n)
    a[...] = block
    if n >= BLAS_MIN_SIZE:
        _tridiagonalize_blocked(a, d, e, tau)
        if want_vectors:
            _accumulate_blocked(a, tau, zt)
    else:
        _tridiagonalize_panel(a, d, e, tau, PANEL)
        if want_vectors:
            _accumulate_transposed(a, tau, zt)
    if want_vectors:
        status = _implicit_ql(d, e, zt, True, max_sweeps)
    else:
        status = _root_free_ql(d, e, max_sweeps)
    if status:
        raise EigenConvergenceError(
            f"implicit QL did not converge for eigenvalue {status - 1} "
            f"after {max_sweeps} sweeps (n={n})")
    order = np.argsort(d, kind="stable")
    values = d[order].copy()
    vectors = zt[order].T.copy() if want_vectors else None
    return EigenResult(values, vectors)
