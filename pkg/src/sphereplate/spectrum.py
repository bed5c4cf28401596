"""Mode spectrum of the sphere/substrate system and its zero-point energy."""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coupling import SpherePlateGeometry, build_block, mode_count
from .eigen import EigenResult, Workspace, eigenvalues
from .physics import DielectricModel, ModeCollapseError, contrast_factor

TRACE_RTOL = 1e-12
POLE_ATOL = 1e-9
# blocks up to this size always get eigenvectors so their shifts can be refined
REFINE_MAX_SIZE = 48

_local = threading.local()


def _workspace() -> Workspace:
    ws = getattr(_local, "ws", None)
    if ws is None:
        ws = _local.ws = Workspace()
    return ws


def default_workers() -> int:
    env = os.environ.get("SPHEREPLATE_WORKERS")
    if env:
        return max(1, int(env))
    return 1


@dataclass(frozen=True)
class BlockSpectrum:
    """Eigenvalues of one m-block, ascending, paired with ``reference = l/(2l+1)``.

    ``shifts`` are ``values - reference``; where eigenvectors were available
    they come from Rayleigh quotients taken relative to the paired reference
    value, which keeps full relative accuracy when the coupling is tiny.
    """

    m: int
    degeneracy: int
    values: np.ndarray
    reference: np.ndarray
    shifts: np.ndarray
    vectors: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ModeSpectrum:
    geom: SpherePlateGeometry
    f_c: float
    L: int
    blocks: tuple[BlockSpectrum, ...]

    @property
    def mode_count(self) -> int:
        return sum(b.degeneracy * b.values.size for b in self.blocks)

    @property
    def valid(self) -> bool:
        return all(b.values[0] > 0.0 and b.values[-1] < 1.0 for b in self.blocks)

    @property
    def lowest(self) -> float:
        return min(b.values[0] for b in self.blocks)

    @property
    def has_vectors(self) -> bool:
        return all(b.vectors is not None for b in self.blocks)


@dataclass(frozen=True)
class ScaledMultipoleState:
    """Scaled multipole amplitudes ``x`` and scaled drive ``b`` of one m-block."""

    x: np.ndarray
    b: np.ndarray

    @classmethod
    def from_drive(cls, b) -> "ScaledMultipoleState":
        b = np.asarray(b, dtype=float)
        return cls(x=np.zeros_like(b), b=b)

    @classmethod
    def from_multipoles(cls, orders, R: float, Q, V_vac) -> "ScaledMultipoleState":
        scale = np.sqrt(np.asarray(orders, dtype=float) * R ** (2 * np.asarray(orders) + 1.0))
        return cls(x=np.asarray(Q, dtype=float) / scale,
                   b=-scale * np.asarray(V_vac, dtype=float) / (4.0 * math.pi))

    def multipoles(self, orders, R: float) -> np.ndarray:
        scale = np.sqrt(np.asarray(orders, dtype=float) * R ** (2 * np.asarray(orders) + 1.0))
        return self.x * scale


def _resolve_contrast(substrate) -> float:
    if isinstance(substrate, DielectricModel):
        return contrast_factor(substrate)
    return float(substrate)


def refined_shifts(reference: np.ndarray, coupling: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Rayleigh-quotient eigenvalue shifts relative to the ascending-paired reference.

    shift_k = (sum_l (n0_l - n0_k) v_l^2 + v^T C v) / v^T v
    """
    sq = vectors * vectors
    spread = (reference[:, None] - reference[None, :]) * sq
    num = spread.sum(axis=0) + np.einsum("ij,ij->j", vectors, coupling @ vectors)
    return num / sq.sum(axis=0)


def _solve_block(m: int, L: int, geom: SpherePlateGeometry, f_c: float,
                 want_vectors: bool) -> BlockSpectrum:
    block = build_block(m, L, geom, f_c)
    vectors_needed = want_vectors or block.size <= REFINE_MAX_SIZE
    res = eigenvalues(block.entries, want_vectors=vectors_needed, workspace=_workspace())
    trace = math.fsum(np.diag(block.entries))
    scale = math.fsum(np.abs(np.diag(block.entries)))
    if abs(math.fsum(res.values) - trace) > TRACE_RTOL * scale:
        raise ArithmeticError(f"trace not preserved in block m={m}, L={L}")
    reference = block.reference
    if res.vectors is not None:
        shifts = refined_shifts(reference, block.coupling, res.vectors)
    else:
        shifts = res.values - reference
    return BlockSpectrum(m=m, degeneracy=1 if m == 0 else 2, values=res.values,
                         reference=reference, shifts=shifts,
                         vectors=res.vectors if want_vectors else None)


def solve_spectrum(geom: SpherePlateGeometry, substrate, L: int, want_vectors: bool = False,
                   workers: int | None = None, split_signs: bool = False) -> ModeSpectrum:
    """Diagonalize every m-block up to truncation order ``L``.

    ``substrate`` is a :class:`DielectricModel` or the contrast factor itself.
    With ``split_signs`` the -m blocks are stored explicitly (degeneracy 1)
    instead of doubling the m > 0 blocks.
    """
    L = int(L)
    if L < 1:
        raise ValueError("L must be >= 1")
    f_c = _resolve_contrast(substrate)
    workers = default_workers() if workers is None else max(1, int(workers))
    ms = range(L + 1)
    if workers > 1:
        # m = 0 is the largest block, so submission in m order starts it first
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {m: pool.submit(_solve_block, m, L, geom, f_c, want_vectors)
                       for m in ms}
            blocks = [futures[m].result() for m in ms]
    else:
        blocks = [_solve_block(m, L, geom, f_c, want_vectors) for m in ms]
    if split_signs:
        expanded = []
        for b in blocks:
            if b.m == 0:
                expanded.append(b)
            else:
                for sm in (b.m, -b.m):
                    expanded.append(BlockSpectrum(sm, 1, b.values, b.reference, b.shifts,
                                                  b.vectors))
        blocks = expanded
    spec = ModeSpectrum(geom=geom, f_c=f_c, L=L, blocks=tuple(blocks))
    assert spec.mode_count == mode_count(L)
    return spec


def _block_shift(b: BlockSpectrum, gamma: float) -> np.ndarray:
    # sqrt(n) - sqrt(n0) written without the cancelling subtraction
    values = b.reference + b.shifts
    if gamma:
        q = 0.25 * gamma * gamma
        if values.min() <= q or b.reference[0] <= q:
            raise ModeCollapseError("overdamped mode in damped energy sum")
        return b.shifts / (np.sqrt(values - q) + np.sqrt(b.reference - q))
    return b.shifts / (np.sqrt(values) + np.sqrt(b.reference))


def mode_shifts(spec: ModeSpectrum, model: DielectricModel | None = None,
                damped: bool = False) -> list[float]:
    """Per-mode frequency shifts (units of omega_p), degeneracy expanded."""
    if not spec.valid:
        raise ModeCollapseError(
            f"eigenvalue outside (0, 1) at z/R={spec.geom.z_over_R!r}, L={spec.L}")
    gamma = model.inv_tau_wp if (damped and model is not None) else 0.0
    terms: list[float] = []
    for b in spec.blocks:
        shift = _block_shift(b, gamma)
        terms.extend(shift.tolist() * b.degeneracy)
    return terms


def interaction_energy(spec: ModeSpectrum, model: DielectricModel | None = None,
                       damped: bool = False) -> float:
    """Zero-point energy of the coupled modes minus the isolated sphere, in hbar*omega_p.

    Eigenvalues and isolated-sphere values are paired in ascending order
    within each block and summed with :func:`math.fsum`. ``damped`` uses
    the real part of the damped mode frequency instead of ``sqrt(n)``.
    """
    return 0.5 * math.fsum(mode_shifts(spec, model, damped))


def greens_response(eigen: EigenResult, u: float,
                    drive: ScaledMultipoleState) -> ScaledMultipoleState:
    """Solve ``(H - u) x = b`` through the spectral decomposition of ``H``."""
    if eigen.vectors is None:
        raise ValueError("greens_response needs eigenvectors")
    gap = u - eigen.values
    if np.min(np.abs(gap)) < POLE_ATOL:
        raise ZeroDivisionError(f"u={u!r} within {POLE_ATOL} of a pole")
    V = eigen.vectors
    x = -V @ ((V.T @ drive.b) / gap)
    return ScaledMultipoleState(x=x, b=drive.b)


@dataclass(frozen=True)
class ConvergenceResult:
    spectrum: ModeSpectrum
    L_used: int
    converged: bool
    energy: float
    last_delta: float
    history: tuple[tuple[int, float], ...]


def converge_L(geom: SpherePlateGeometry, substrate, model: DielectricModel | None = None,
               rel_tol: float = 1e-6, L_start: int = 4, L_step: int = 4, L_cap: int = 2000,
               want_vectors: bool = False, workers: int | None = None) -> ConvergenceResult:
    """Grow the truncation until the energy stops changing.

    Orders tested are ``L_start, L_start + L_step, ...`` with the step
    doubling each time (4, 8, 16, 32, ... by default). The result holds the
    spectrum at the larger order of the first pair that agrees within
    ``rel_tol``; hitting ``L_cap`` first returns ``converged=False`` with
    the last estimate.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    if L_cap < L_start:
        raise ValueError("L_cap must be >= L_start")
    L = int(L_start)
    spec = solve_spectrum(geom, substrate, L, want_vectors=False, workers=workers)
    energy = interaction_energy(spec, model)
    history = [(L, energy)]
    if math.isinf(rel_tol):
        return _finish(spec, L, True, energy, 0.0, history, want_vectors, model, workers)
    step = int(L_step)
    delta = math.inf
    while True:
        L_next = min(L + step, int(L_cap))
        if L_next == L:
            break
        nxt = solve_spectrum(geom, substrate, L_next, want_vectors=False, workers=workers)
        e_next = interaction_energy(nxt, model)
        history.append((L_next, e_next))
        delta = abs(e_next - energy)
        spec, energy, L = nxt, e_next, L_next
        if delta <= rel_tol * abs(e_next):
            return _finish(spec, L, True, energy, delta, history, want_vectors, model, workers)
        step *= 2
    return _finish(spec, L, False, energy, delta, history, want_vectors, model, workers)


def _finish(spec, L, converged, energy, delta, history, want_vectors, model, workers):
    if want_vectors:
        # the vector path rounds differently; report the energy of the returned spectrum
        spec = solve_spectrum(spec.geom, spec.f_c, L, want_vectors=True, workers=workers)
        energy = interaction_energy(spec, model)
    return ConvergenceResult(spec, L, converged, energy, delta, tuple(history))
