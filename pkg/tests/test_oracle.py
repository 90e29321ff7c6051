"""Eigenfunction series for the circular cylinder, checked independently of its own construction."""

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from ssie2d import oracle
from ssie2d.operators import FREE_SPACE, Medium
from ssie2d.oracle import OracleError, mie_coefficients, mie_field, mie_scattering_width
from ssie2d.specfun import bessel_j


def radial_mode_coefficients(n, k0, k1, radius=1.0, rho_out=1.5, cells=30000):
    """(a_n, b_n) from a second-order finite-difference solve of the radial mode equation.

    The scattered part u_s of mode n obeys
    u'' + u'/rho + (k^2 - n^2/rho^2) u = -(k^2 - k0^2) J_n(k0 rho)
    with regularity at the axis and the exact outgoing condition at rho_out.
    ``cells`` must put ``radius`` on a grid node.
    Reference Bessel values come from scipy.special, not from the package.
    """
    h = rho_out / cells
    rho = np.arange(cells + 1) * h
    kk = np.where(rho < radius, k1**2, k0**2)
    kk[np.isclose(rho, radius)] = 0.5 * (k0**2 + k1**2)
    u_inc = special.jv(n, k0 * rho)
    rhs = (-(kk - k0**2) * u_inc).astype(complex)
    band = np.zeros((3, cells + 1), dtype=complex)
    i = np.arange(1, cells + 1)
    rp, rm = rho[i] + h / 2, rho[i] - h / 2
    scale = 1.0 / (rho[i] * h * h)
    band[0, i[:-1] + 1] = (rp * scale)[:-1]
    band[2, i - 1] = rm * scale
    band[1, i] = -(rp + rm) * scale + kk[i] - n * n / rho[i] ** 2
    if n == 0:
        band[1, 0] = -4 / h**2 + kk[0]
        band[0, 1] = 4 / h**2
    else:
        band[1, 0] = 1.0
        band[0, 1] = 0.0
        rhs[0] = 0.0
    # ghost node from u' = c u at rho_out
    c = k0 * special.h2vp(n, k0 * rho_out) / special.hankel2(n, k0 * rho_out)
    band[2, cells - 1] = (rm[-1] + rp[-1]) * scale[-1]
    band[1, cells] += rp[-1] * scale[-1] * 2 * h * c
    u = scipy.linalg.solve_banded((1, 1), band, rhs)
    a = u[-1] / special.hankel2(n, k0 * rho_out)
    mid = cells // 3  # rho = rho_out / 3 < radius
    b = (u[mid] + u_inc[mid]) / special.jv(n, k1 * rho[mid])
    return a, b


@pytest.fixture(scope="module")
def mie(cylinder_mie):
    return cylinder_mie


def test_coefficients_match_radial_finite_differences(mie):
    peak_a = np.max(np.abs(mie.a))
    peak_b = np.max(np.abs(mie.b))
    for n in range(10):
        a, b = radial_mode_coefficients(n, mie.k0, mie.k1)
        assert abs(a - mie.a[n]) <= 1e-4 * peak_a
        assert abs(b - mie.b[n]) <= 1e-4 * peak_b


def test_mode_system_residual(mie):
    assert mie.residual <= 1e-13


def test_coefficient_symmetry(mie):
    a = mie.full(mie.a)
    b = mie.full(mie.b)
    assert np.array_equal(a, a[::-1])
    assert np.array_equal(b, b[::-1])
    assert len(a) == 2 * mie.n_max + 1


def test_tail_convergence(mie):
    assert abs(mie.a[-1]) / np.max(np.abs(mie.a)) <= 1e-12
    assert mie.n_max >= mie.k1 * mie.radius + 8


def test_no_contrast_is_transparent():
    sol = mie_coefficients(1.0, FREE_SPACE, FREE_SPACE, 300e6)
    assert np.all(sol.a == 0)
    assert np.all(sol.b == 1)
    pts = np.array([[0.0, 0.0], [0.3, -0.4], [1.5, 0.2], [-2.0, 3.0]])
    k0 = sol.k0
    assert np.allclose(mie_field(sol, pts), np.exp(-1j * k0 * pts[:, 0]), rtol=0, atol=1e-13)
    assert np.all(mie_scattering_width(sol, np.linspace(0, 6, 7)).sigma == 0)


def test_continuity_across_the_surface(mie):
    phi = np.linspace(0, 2 * np.pi, 13)
    d = 1e-9
    r = mie.radius + np.array([-2 * d, -d, d, 2 * d])
    for p in phi:
        pts = np.outer(r, [np.cos(p), np.sin(p)])
        e = mie_field(mie, pts)
        # each side extrapolated linearly to the surface removes the genuine slope
        inner = 2 * e[1] - e[0]
        outer = 2 * e[2] - e[3]
        assert abs(inner - outer) <= 1e-8 * abs(outer)
        # without extrapolation the gap is just the field's own change over 2d
        assert abs(e[1] - e[2]) <= 2 * d * 2 * mie.k1 * np.max(np.abs(mie.b)) * 2 * mie.n_max


def test_centre_value_is_zeroth_interior_term(mie):
    assert mie_field(mie, [[0.0, 0.0]])[0] == pytest.approx(mie.b[0] * bessel_j(0, 0.0), rel=1e-14)


def test_mirror_symmetry(mie):
    pts = np.array([[0.3, 0.4], [1.7, 0.9], [-2.2, 1.1], [0.0, 0.5]])
    flipped = pts * [1, -1]
    assert np.allclose(mie_field(mie, pts), mie_field(mie, flipped), rtol=1e-12, atol=0)
    phi = np.linspace(0.1, 3.0, 17)
    s = mie_scattering_width(mie, phi).sigma
    assert np.allclose(s, mie_scattering_width(mie, -phi).sigma, rtol=1e-12, atol=0)


def test_scattering_width_matches_field_at_large_range(mie):
    phi = np.linspace(0, np.pi, 7)

    def sigma_at(rho):
        pts = rho * np.column_stack([np.cos(phi), np.sin(phi)])
        scattered = mie_field(mie, pts) - np.exp(-1j * mie.k0 * pts[:, 0])
        return 2 * np.pi * rho * np.abs(scattered) ** 2

    sigma = mie_scattering_width(mie, phi).sigma
    near, far = sigma_at(500.0), sigma_at(1000.0)
    # the leading correction is O(n^2 / (k0 rho)); it halves between the two ranges
    assert np.max(np.abs(far - sigma)) < 0.6 * np.max(np.abs(near - sigma))
    # and Richardson extrapolation removes it
    assert np.all(np.abs(2 * far - near - sigma) <= 1e-4 * np.max(sigma))


def test_optical_theorem(mie):
    sca = oracle.mie_scattering_cross_width(mie)
    ext = oracle.mie_extinction_width(mie)
    assert abs(sca - ext) <= 1e-6 * ext
    # the trapezoid rule on the pattern agrees with the closed-form sum
    phi = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    assert np.mean(mie_scattering_width(mie, phi).sigma) == pytest.approx(sca, rel=1e-12)


def test_rotated_incidence_rotates_the_field():
    base = mie_coefficients(1.0, Medium(eps_r=3), FREE_SPACE, 200e6)
    turned = mie_coefficients(1.0, Medium(eps_r=3), FREE_SPACE, 200e6, angle=0.7)
    rot = np.array([[np.cos(0.7), -np.sin(0.7)], [np.sin(0.7), np.cos(0.7)]])
    pts = np.array([[0.2, 0.1], [1.4, -0.3], [-0.5, 2.0]])
    assert np.allclose(mie_field(turned, pts @ rot.T), mie_field(base, pts), rtol=1e-12)


def test_shifted_cylinder_keeps_origin_phase_reference():
    sol = mie_coefficients(0.5, Medium(eps_r=2), FREE_SPACE, 300e6, center=(1.0, 2.0), amplitude=2.0)
    far_upstream = np.array([[-40.0, 2.0]])
    # far upstream the scattered wave is small compared with the incident one
    inc = 2.0 * np.exp(-1j * sol.k0 * far_upstream[:, 0])
    assert abs(mie_field(sol, far_upstream)[0] - inc[0]) < 0.2


def test_mu_contrast_is_supported():
    sol = mie_coefficients(1.0, Medium(eps_r=2, mu_r=2), FREE_SPACE, 100e6)
    assert sol.residual <= 1e-13
    assert oracle.mie_scattering_cross_width(sol) == pytest.approx(oracle.mie_extinction_width(sol), rel=1e-6)


def test_rejects_lossy_and_bad_inputs():
    with pytest.raises(OracleError):
        mie_coefficients(1.0, Medium(eps_r=4, sigma=0.1), FREE_SPACE, 300e6)
    with pytest.raises(OracleError):
        mie_coefficients(0.0, Medium(eps_r=4), FREE_SPACE, 300e6)
    with pytest.raises(OracleError):
        mie_coefficients(1.0, Medium(eps_r=4), FREE_SPACE, -1.0)


@pytest.mark.parametrize("f", np.geomspace(15e6, 150e6, 10))
def test_tail_criterion_over_frequency_sweep(f):
    sol = mie_coefficients(1.0, Medium(eps_r=4), FREE_SPACE, f)
    assert abs(sol.a[-1]) / np.max(np.abs(sol.a)) <= 1e-12
    assert sol.residual <= 1e-13


def test_near_unit_contrast_is_nearly_transparent():
    sol = mie_coefficients(1.0, Medium(eps_r=1.0 + 1e-9), FREE_SPACE, 300e6)
    assert np.max(np.abs(sol.a)) < 1e-8
    assert np.allclose(sol.b, 1.0, atol=1e-8)


@given(eps_r=st.floats(1.01, 15.0), f=st.floats(15e6, 300e6))
def test_series_invariants(eps_r, f):
    sol = mie_coefficients(1.0, Medium(eps_r=eps_r), FREE_SPACE, f)
    assert abs(sol.a[-1]) / np.max(np.abs(sol.a)) <= 1e-12
    assert sol.residual <= 1e-13
    sca = oracle.mie_scattering_cross_width(sol)
    assert sca == pytest.approx(oracle.mie_extinction_width(sol), rel=1e-6)
    # lossless passive scattering: |1 + 2 a_n| = 1 for every mode
    assert np.allclose(np.abs(1 + 2 * sol.a), 1.0, atol=1e-10)
    # the interior and exterior series agree on the surface
    p = np.array([[math.cos(0.4), math.sin(0.4)]])
    inner = mie_field(sol, p * (1 - 1e-10))[0]
    outer = mie_field(sol, p * (1 + 1e-10))[0]
    assert abs(inner - outer) <= 1e-7 * max(1.0, abs(outer))
