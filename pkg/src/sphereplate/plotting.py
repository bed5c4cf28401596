"""Figure rendering for sweep reports (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "axes.labelsize": 11,
    "font.size": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "figure.dpi": 150,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "savefig.bbox": "tight",
}

STYLES = {"1": ("dipole", ":"), "2": ("quadrupole", "--"), "full": ("all multipoles", "-")}


def _series(samples, truncation, xattr, yattr):
    rows = sorted((s for s in samples if s.truncation == truncation and s.status == "ok"),
                  key=lambda s: s.z_over_R)
    x = np.array([getattr(s, xattr) for s in rows])
    y = np.array([getattr(s, yattr) if isinstance(yattr, str) else yattr(s) for s in rows])
    return x, y


def render_figures(samples, cfg, out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = []
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for t in cfg.truncations:
            x, y = _series(samples, t, "z_over_R", "energy_eV")
            if x.size:
                label, ls = STYLES[t]
                ax.loglog(x, np.abs(y), ls, marker="o", label=label)
        ax.set_xlabel("z/R")
        ax.set_ylabel("|E| (eV)")
        ax.legend()
        paths.append(out / "energy.png")
        fig.savefig(paths[-1])
        plt.close(fig)

        fig, ax = plt.subplots()
        for t in cfg.truncations:
            x, y = _series(samples, t, "z_nm", "force_eV_per_nm")
            if x.size:
                label, ls = STYLES[t]
                ax.loglog(x, np.abs(y), ls, marker="o", label=label)
        first = cfg.truncations[0]
        for col, label in (("pt_ideal_force_eV_per_nm", "PT, ideal plates"),
                           ("pt_nonretarded_force_eV_per_nm", "PT, non-retarded plates"),
                           ("pt_ideal_roughness_force_eV_per_nm", "PT with roughness")):
            x, y = _series(samples, first, "z_nm", lambda s, c=col: s.extras.get(c, np.nan))
            if x.size and np.isfinite(y).any():
                ax.loglog(x, np.abs(y), "-.", lw=0.8, label=label)
        ax.set_xlabel("z (nm)")
        ax.set_ylabel("|F| (eV/nm)")
        ax.legend()
        paths.append(out / "force.png")
        fig.savefig(paths[-1])
        plt.close(fig)

        fig, ax = plt.subplots()
        for t in cfg.truncations:
            x, y = _series(samples, t, "z_over_R", "slope_local")
            if x.size:
                label, ls = STYLES[t]
                ax.semilogx(x, y, ls, marker="o", label=label)
        for p in (-3, -4, -5):
            ax.axhline(p, color="0.7", lw=0.6)
        ax.set_xlabel("z/R")
        ax.set_ylabel(r"d ln|E| / d ln(z/R)")
        ax.legend()
        paths.append(out / "slope.png")
        fig.savefig(paths[-1])
        plt.close(fig)
    return paths
