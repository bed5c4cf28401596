"""Non-retarded van der Waals interaction of a sphere above a flat substrate.

The full multipolar mode spectrum of the sphere/image system is obtained
by diagonalizing a dimensionless, m-conserving coupling matrix; the
interaction energy is the shift of the zero-point energy of those modes.
"""

from .physics import (DielectricModel, contrast_factor, spectral_u,
                      omega_of_eigenvalue, sphere_polarizability, HBAR_C_EV_NM)
from .coupling import SpherePlateGeometry, CouplingBlock, build_block, coupling_coefficient
from .eigen import EigenResult, eigenvalues
from .spectrum import (ModeSpectrum, solve_spectrum, interaction_energy, converge_L,
                       greens_response)
from .force import force_hellmann_feynman, force_finite_difference, local_slope

__version__ = "0.1.0"

__all__ = [
    "DielectricModel", "contrast_factor", "spectral_u", "omega_of_eigenvalue",
    "sphere_polarizability", "HBAR_C_EV_NM", "SpherePlateGeometry", "CouplingBlock",
    "build_block", "coupling_coefficient", "EigenResult", "eigenvalues", "ModeSpectrum",
    "solve_spectrum", "interaction_energy", "converge_L", "greens_response",
    "force_hellmann_feynman", "force_finite_difference", "local_slope",
]
