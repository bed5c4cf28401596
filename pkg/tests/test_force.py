import math

import numpy as np
import pytest

from sphereplate.coupling import SpherePlateGeometry
from sphereplate.force import force_finite_difference, force_hellmann_feynman, local_slope
from sphereplate.spectrum import converge_L, interaction_energy, solve_spectrum

from conftest import F_C, dipole_closed_form


def test_fd_calculus_checks():
    assert force_finite_difference(lambda z: z * z, 3.0) == pytest.approx(-6.0, rel=1e-12)
    assert force_finite_difference(lambda z: 0.0, 3.0) == 0.0
    with pytest.raises(ValueError):
        force_finite_difference(lambda z: z, 1.0, h_rel=0.02)
    with pytest.raises(ValueError):
        force_finite_difference(lambda z: z, -1.0)


def test_fd_reproduces_asymptotic_derivative():
    R = 50.0
    geom = SpherePlateGeometry.from_ratio(20.0, R)

    def asymptote(z):
        x = R / (2 * (z + R))
        return F_C / math.sqrt(3) * x ** 3

    fd = force_finite_difference(asymptote, geom.z)
    assert fd == pytest.approx(3 * asymptote(geom.z) / (geom.z + R), rel=1e-4)


def test_null_contrast_zero_force():
    geom = SpherePlateGeometry.from_ratio(0.2, 50.0)
    assert force_hellmann_feynman(solve_spectrum(geom, 0.0, 12, want_vectors=True)) == 0.0
    far = SpherePlateGeometry(50.0, 1e200)
    assert force_hellmann_feynman(solve_spectrum(far, -1.0, 5, want_vectors=True)) == 0.0


def test_hf_needs_vectors():
    with pytest.raises(ValueError):
        force_hellmann_feynman(solve_spectrum(SpherePlateGeometry(1.0, 1.0), -1.0, 3))


def test_hf_dipole_closed_form():
    R = 50.0
    for z_over_R in (0.05, 1.0, 12.0):
        geom = SpherePlateGeometry.from_ratio(z_over_R, R)
        z, x = geom.z, geom.x
        # dE/dx of the closed form, then dx/dz = -x/(z+R)
        a0 = math.sqrt(1 / 3 + 2 / 3 * F_C * x ** 3)
        a1 = math.sqrt(1 / 3 + 1 / 3 * F_C * x ** 3)
        dEdx = 0.5 * (F_C * x * x / a0 + F_C * x * x / a1)
        expected = dEdx * x / (z + R)
        hf = force_hellmann_feynman(solve_spectrum(geom, F_C, 1, want_vectors=True))
        assert hf == pytest.approx(expected, rel=1e-10)
        assert dipole_closed_form(x, F_C) < 0 and hf < 0


@pytest.mark.parametrize("z_over_R, L", [(0.37, 24), (2.2, 10), (0.13, 40)])
def test_hf_matches_fd(z_over_R, L):
    R = 37.0
    geom = SpherePlateGeometry.from_ratio(z_over_R, R)
    hf = force_hellmann_feynman(solve_spectrum(geom, -0.77, L, want_vectors=True))
    fd = force_finite_difference(
        lambda z: interaction_energy(solve_spectrum(SpherePlateGeometry(R, z), -0.77, L)), geom.z)
    assert hf == pytest.approx(fd, rel=1e-6)


def test_force_grows_toward_contact():
    L = 16
    forces = [force_hellmann_feynman(solve_spectrum(SpherePlateGeometry.from_ratio(s, 50.0), F_C,
                                                    L, want_vectors=True))
              for s in np.geomspace(20.0, 0.05, 15)]
    mags = np.abs(forces)
    assert np.all(np.array(forces) < 0)
    assert np.all(np.diff(mags) > 0)


def test_slope_examples():
    z = np.geomspace(1.0, 50.0, 12)
    s = local_slope(z, 4.2 * z ** -3.0)
    assert np.isnan(s[0]) and np.isnan(s[-1])
    assert np.max(np.abs(s[1:-1] + 3.0)) < 1e-12
    e = -(z ** -2.0)
    e[5] = 0.0
    s = local_slope(z, e)
    assert np.isnan(s[4]) and np.isnan(s[6])
    assert np.all(np.isnan(local_slope([1.0, 2.0], [1.0, 2.0])))


def test_full_slope_near_minus_three_at_large_gap():
    z = np.geomspace(30.0, 100.0, 5)
    energies = [converge_L(SpherePlateGeometry.from_ratio(s, 50.0), F_C).energy for s in z]
    slopes = local_slope(z, energies)[1:-1]
    # E ~ x^3 gives d ln E / d ln(z/R) = -3 (z/R) / (z/R + 1)
    assert np.allclose(slopes, -3 * z[1:-1] / (z[1:-1] + 1), atol=0.02)


@pytest.mark.slow
def test_full_slope_near_contact_steeper_than_minus_six():
    from _contact import contact_run
    run = contact_run()
    # d ln|E| / d ln z = -z F / E
    slope = -run.z_nm * run.force / run.energy
    print(f"local slope of the converged energy at z/R=0.01: {slope:.4f}")
    assert slope < -6.0
