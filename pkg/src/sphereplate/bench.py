"""Eigensolver timing against block size."""

from __future__ import annotations

import statistics
import time

from .coupling import SpherePlateGeometry, build_block
from .eigen import Workspace, eigenvalues


def bench(sizes, repeats: int = 3, z_over_R: float = 0.1, want_vectors: bool = False,
          f_c: float = -1.0, min_time: float = 0.25) -> list[dict]:
    """Time the solver on m = 0 coupling blocks of the given sizes.

    Each size runs at least ``repeats`` times and keeps going until
    ``min_time`` seconds have been spent, so small sizes are not at the
    mercy of a single scheduler hiccup. Each row reports the best and mean
    wall time, the relative spread of the repeats, a flop-rate estimate
    (4/3 n^3 for the reduction) and the time ratio to the previous size.
    """
    geom = SpherePlateGeometry.from_ratio(z_over_R)
    ws = Workspace()
    eigenvalues(build_block(0, 2, geom, f_c).entries, want_vectors, ws)  # JIT warm-up
    rows = []
    prev = None
    for n in sizes:
        n = int(n)
        block = build_block(0, n, geom, f_c).entries
        eigenvalues(block, want_vectors, ws)
        times = []
        while len(times) < max(1, repeats) or (sum(times) < min_time and len(times) < 1000):
            t0 = time.perf_counter()
            eigenvalues(block, want_vectors, ws)
            times.append(time.perf_counter() - t0)
        best = min(times)
        mean = statistics.fmean(times)
        spread = (statistics.pstdev(times) / mean) if mean > 0 else 0.0
        rows.append({
            "size": n,
            "best_s": best,
            "mean_s": mean,
            "spread": spread,
            "gflops": (4.0 / 3.0 * n ** 3) / best / 1e9 if best > 0 else float("nan"),
            "ratio_to_prev": best / prev if prev else float("nan"),
        })
        prev = best
    return rows
