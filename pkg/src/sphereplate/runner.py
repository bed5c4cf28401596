"""Sweep orchestration: one row per (gap, truncation)."""

from __future__ import annotations

import logging
import math
import time
from typing import Callable, Iterable

from .baselines import plate_plate_nonretarded_energy, pt_force, pt_force_perfect_conductor, \
    roughness_multiplier
from .config import RunConfig
from .coupling import SpherePlateGeometry
from .eigen import EigenConvergenceError
from .force import CurveSample, force_finite_difference, force_hellmann_feynman, local_slope
from .physics import ModeCollapseError, OverdampedModeError, contrast_factor
from .spectrum import converge_L, interaction_energy, solve_spectrum

log = logging.getLogger(__name__)

CORE_COLUMNS = ("z_over_R", "z_nm", "truncation", "L_used", "energy_hbar_wp", "energy_eV",
                "force_eV_per_nm", "force_method", "slope_local", "status")

STATUS_OK = "ok"


def extra_columns(cfg: RunConfig) -> list[str]:
    """Optional columns, appended after the core schema in a fixed order."""
    cols = []
    if cfg.force_method == "both":
        cols.append("force_fd_eV_per_nm")
    if cfg.report_damped:
        cols.append("energy_damped_hbar_wp")
    if "pt_ideal" in cfg.baselines:
        cols.append("pt_ideal_force_eV_per_nm")
    if "pt_nonretarded" in cfg.baselines:
        cols.append("pt_nonretarded_force_eV_per_nm")
    if "roughness" in cfg.baselines:
        cols.append("pt_ideal_roughness_force_eV_per_nm")
    return cols


def _truncation_L(cfg: RunConfig, truncation: str) -> int | None:
    if truncation == "full":
        return None if cfg.L_policy == "auto" else int(cfg.L_policy)
    return int(truncation)


def _baselines(cfg: RunConfig, z_nm: float) -> dict:
    out = {}
    if "pt_ideal" in cfg.baselines:
        out["pt_ideal_force_eV_per_nm"] = pt_force_perfect_conductor(z_nm, cfg.R_nm)
    if "pt_nonretarded" in cfg.baselines:
        out["pt_nonretarded_force_eV_per_nm"] = pt_force(
            z_nm, cfg.R_nm,
            plate_energy=lambda z: plate_plate_nonretarded_energy(z, cfg.omega_p_eV))
    if "roughness" in cfg.baselines:
        out["pt_ideal_roughness_force_eV_per_nm"] = (
            pt_force_perfect_conductor(z_nm, cfg.R_nm)
            * roughness_multiplier(z_nm, cfg.roughness_A_r_nm))
    return out


def evaluate_sample(cfg: RunConfig, z_over_R: float, truncation: str) -> CurveSample:
    """Energy and force at one gap for one truncation; failures land in ``status``."""
    f_c = contrast_factor(cfg.substrate)
    geom = SpherePlateGeometry.from_ratio(z_over_R, cfg.R_nm)
    wp = cfg.omega_p_eV
    want_vectors = cfg.force_method in ("hf", "both")
    sample = CurveSample(z_over_R=float(z_over_R), z_nm=geom.z, truncation=truncation,
                         L_used=0, energy_hbar_wp=math.nan, energy_eV=math.nan,
                         force_eV_per_nm=math.nan, force_method=cfg.force_method)
    extras = dict.fromkeys(extra_columns(cfg), math.nan)
    sample.extras = extras
    try:
        L = _truncation_L(cfg, truncation)
        status = STATUS_OK
        if L is None:
            res = converge_L(geom, f_c, cfg.sphere, rel_tol=cfg.rel_tol, L_start=cfg.L_start,
                             L_step=cfg.L_step, L_cap=cfg.L_cap, want_vectors=want_vectors,
                             workers=cfg.workers)
            spec, L = res.spectrum, res.L_used
            if not res.converged:
                status = "not_converged"
        else:
            spec = solve_spectrum(geom, f_c, L, want_vectors=want_vectors, workers=cfg.workers)
        sample.L_used = L
        energy = interaction_energy(spec)
        sample.energy_hbar_wp = energy
        sample.energy_eV = energy * wp
        force_fd = None
        if cfg.force_method in ("fd", "both"):
            def energy_at(z):
                g = SpherePlateGeometry(cfg.R_nm, z)
                return interaction_energy(solve_spectrum(g, f_c, L, workers=cfg.workers))
            force_fd = force_finite_difference(energy_at, geom.z, cfg.h_rel) * wp
        if want_vectors:
            sample.force_eV_per_nm = force_hellmann_feynman(spec) * wp
            if force_fd is not None:
                extras["force_fd_eV_per_nm"] = force_fd
        else:
            sample.force_eV_per_nm = force_fd
        if cfg.report_damped:
            try:
                extras["energy_damped_hbar_wp"] = interaction_energy(spec, cfg.sphere, damped=True)
            except ModeCollapseError:
                pass
        if f_c < 0 and sample.force_eV_per_nm > 0 and status == STATUS_OK:
            status = "force_sign"
        sample.status = status
    except ModeCollapseError:
        sample.status = "mode_collapse"
    except OverdampedModeError:
        sample.status = "overdamped"
    except (EigenConvergenceError, ArithmeticError):
        log.exception("eigensolver failure at z/R=%r, truncation=%s", z_over_R, truncation)
        sample.status = "eigen_failure"
    extras.update(_baselines(cfg, geom.z))
    return sample


def apply_slopes(samples: list[CurveSample]) -> None:
    """Fill ``slope_local`` per truncation series, ordered by z/R."""
    series: dict[str, list[CurveSample]] = {}
    for s in samples:
        series.setdefault(s.truncation, []).append(s)
    for rows in series.values():
        rows = sorted(rows, key=lambda r: r.z_over_R)
        slopes = local_slope([r.z_over_R for r in rows], [r.energy_hbar_wp for r in rows])
        for r, sl in zip(rows, slopes):
            r.slope_local = float(sl)


def run_sweep(cfg: RunConfig,
              on_point: Callable[[list[CurveSample]], None] | None = None,
              z_values: Iterable[float] | None = None) -> tuple[list[CurveSample], dict]:
    """Evaluate every configured (z, truncation) pair.

    ``on_point`` receives each gap's rows as soon as they are finished, which
    is how partial results reach disk before the sweep ends.
    """
    cfg.validate()
    samples: list[CurveSample] = []
    timings: dict[str, float] = {}
    values = cfg.z_over_R_values() if z_values is None else list(z_values)
    t_all = time.perf_counter()
    for z in values:
        t0 = time.perf_counter()
        rows = [evaluate_sample(cfg, z, t) for t in cfg.truncations]
        timings[repr(float(z))] = time.perf_counter() - t0
        log.info("z/R=%.6g done in %.2fs (%s)", z, timings[repr(float(z))],
                 ", ".join(f"{r.truncation}:L={r.L_used}:{r.status}" for r in rows))
        samples.extend(rows)
        if on_point is not None:
            on_point(rows)
    timings["total"] = time.perf_counter() - t_all
    apply_slopes(samples)
    return samples, timings


def exit_status(samples: list[CurveSample]) -> int:
    return 1 if any(s.status != STATUS_OK for s in samples) else 0
