"""Near-contact converged run shared by the slow tests (computed once per session)."""

from dataclasses import dataclass
from functools import lru_cache

from sphereplate.baselines import dipole_energy
from sphereplate.coupling import SpherePlateGeometry
from sphereplate.force import force_finite_difference
from sphereplate.spectrum import converge_L, interaction_energy, solve_spectrum

from conftest import F_C

R_NM = 50.0
CONTACT_Z_OVER_R = 0.01


@dataclass(frozen=True)
class ContactRun:
    z_nm: float
    L_used: int
    converged: bool
    energy: float
    force: float
    energy_dipole: float
    force_dipole: float


@lru_cache(maxsize=None)
def contact_run() -> ContactRun:
    geom = SpherePlateGeometry.from_ratio(CONTACT_Z_OVER_R, R_NM)
    res = converge_L(geom, F_C, rel_tol=1e-3, L_cap=1500)
    L = res.L_used

    def energy_at(z, order=L):
        return interaction_energy(solve_spectrum(SpherePlateGeometry(R_NM, z), F_C, order))

    # eigenvectors at L ~ 10^3 cost far more than two extra eigenvalue sweeps
    force = force_finite_difference(energy_at, geom.z)
    force_dip = force_finite_difference(lambda z: dipole_energy(SpherePlateGeometry(R_NM, z), F_C),
                                        geom.z)
    return ContactRun(geom.z, L, res.converged, res.energy, force,
                      dipole_energy(geom, F_C), force_dip)
