"""Bessel and Hankel functions against an arbitrary-precision reference and exact identities."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ssie2d import specfun
from ssie2d.acceptance import SPOT_VALUES_HANKEL, SPOT_VALUES_REAL, special_function_checks
from ssie2d.specfun import (
    EULER_GAMMA,
    SpecialFunctionError,
    bessel_j,
    bessel_j_orders,
    bessel_y,
    bessel_y_orders,
    hankel2,
    hankel2_01,
)

mp.mp.dps = 40


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


def reference_j(n, z):
    # mpmath's complex path loses digits for tiny |z| at modest working precision
    with mp.workdps(80):
        return complex(mp.besselj(n, z))


# ---------------------------------------------------------------------------
# exact special values and the first zero of J0
# ---------------------------------------------------------------------------
def test_values_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(7, 0.0) == 0.0


def _j0_series(x: mp.mpf) -> mp.mpf:
    """Ascending series of J0 summed in 60-digit arithmetic."""
    term = mp.mpf(1)
    total = mp.mpf(1)
    q = -(x * x) / 4
    k = 0
    while abs(term) > mp.mpf(10) ** -55:
        k += 1
        term *= q / (k * k)
        total += term
    return total


def test_first_zero_of_j0_by_bisection():
    with mp.workdps(60):
        lo, hi = mp.mpf(2), mp.mpf(3)
        for _ in range(200):
            mid = (lo + hi) / 2
            if _j0_series(lo) * _j0_series(mid) <= 0:
                hi = mid
            else:
                lo = mid
        zero = float((lo + hi) / 2)
    assert zero == pytest.approx(2.404825557695773, abs=1e-15)
    # J0'(x*) = -J1(x*) ~ -0.52, so a representable x* leaves |J0| at the rounding level
    assert abs(bessel_j(0, zero)) < 1e-15


# ---------------------------------------------------------------------------
# spot values against 40-digit references
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("func,n,x,ref", SPOT_VALUES_REAL)
def test_real_spot_values(func, n, x, ref):
    value = bessel_j(n, x) if func == "j" else bessel_y(n, x)
    assert rel(value, ref) <= 1e-12


@pytest.mark.parametrize("n,z,ref", SPOT_VALUES_HANKEL)
def test_complex_hankel_spot_values(n, z, ref):
    assert rel(hankel2(n, z), ref) <= 1e-8


def test_spot_tables_match_mpmath():
    """The frozen tables themselves agree with a fresh high-precision evaluation."""
    for func, n, x, ref in SPOT_VALUES_REAL:
        fresh = mp.besselj(n, x) if func == "j" else mp.bessely(n, x)
        assert rel(ref, complex(fresh)) < 1e-15
    for n, z, ref in SPOT_VALUES_HANKEL:
        assert rel(ref, complex(mp.hankel2(n, z))) < 1e-15


def test_y0_at_one_to_twelve_digits():
    assert rel(bessel_y(0, 1.0), complex(mp.bessely(0, 1))) <= 1e-12


def test_hankel_complex_lossy_argument():
    z = 3 - 0.5j
    assert rel(hankel2(0, z), complex(mp.hankel2(0, z))) <= 1e-8


def test_y0_small_argument_asymptote():
    x = 1e-6
    # the leading behaviour including the constant term; the remainder is O(x^2 ln x)
    asymptote = (2 / math.pi) * (math.log(x / 2) + EULER_GAMMA)
    assert rel(bessel_y(0, x), asymptote) <= 1e-4
    # the bare logarithm is only the dominant trend
    assert bessel_y(0, x) < bessel_y(0, 1e-3) < 0


def test_hankel_large_argument_magnitude():
    x = 500.0
    assert abs(abs(hankel2(0, x)) - math.sqrt(2 / (math.pi * x))) / math.sqrt(2 / (math.pi * x)) <= 1e-3


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_hankel_defining_identity_real(x):
    assert hankel2(0, x) == bessel_j(0, x) - 1j * bessel_y(0, x)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("x", [0.5, 3.0, 20.0])
@pytest.mark.parametrize("n", [0, 5])
def test_wronskian_examples(n, x):
    w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x)
    assert abs(w - 2 / (math.pi * x)) <= 1e-10 * (2 / (math.pi * x))


def test_wronskian_log_grid():
    for x in np.logspace(-3, 2, 20):
        for n in (0, 1, 2, 5, 10):
            j = bessel_j_orders(n + 1, x)
            y = bessel_y_orders(n + 1, x)
            if not np.all(np.isfinite(y)) or abs(y[n + 1]) > 1e280:
                continue
            w = j[n + 1] * y[n] - j[n] * y[n + 1]
            assert abs(w * math.pi * x / 2 - 1) <= 1e-10


def test_recurrence_consistency():
    for x in np.logspace(-3, 2, 20):
        j = bessel_j_orders(61, x)
        try:
            y = bessel_y_orders(61, x)
        except SpecialFunctionError:
            y = bessel_y_orders(8, x)
        for c in (j, y):
            for n in range(1, len(c) - 1):
                if min(abs(c[n - 1]), abs(c[n]), abs(c[n + 1])) <= 1e-280:
                    continue
                lhs = c[n - 1] + c[n + 1]
                rhs = (2 * n / x) * c[n]
                scale = max(abs(c[n - 1]), abs(c[n + 1]), abs(rhs))
                assert abs(lhs - rhs) <= 1e-9 * scale


def test_branch_seam_continuity():
    """Series and asymptotic branches agree at the switch radius."""
    checks = special_function_checks()
    assert checks["seam"] <= 1e-8
    r = specfun.SWITCH_RADIUS
    for z in (r, r * np.exp(-0.3j), r * np.exp(-1.2j)):
        below = z * (1 - 1e-12)
        above = z * (1 + 1e-12)
        for a, b in zip(hankel2_01(below), hankel2_01(above)):
            assert rel(a, b) <= 1e-8


def test_acceptance_checks_all_within_bounds():
    checks = special_function_checks()
    assert checks["spot_real"] <= 1e-10
    assert checks["spot_complex"] <= 1e-8
    assert checks["wronskian"] <= 1e-10
    assert checks["recurrence"] <= 1e-9


# ---------------------------------------------------------------------------
# randomized accuracy against mpmath
# ---------------------------------------------------------------------------
@given(n=st.integers(0, 60), logx=st.floats(-8, 2))
def test_bessel_j_real_accuracy(n, logx):
    x = 10.0**logx
    ref = complex(mp.besselj(n, x))
    assume(abs(ref) > 1e-290)
    assert rel(bessel_j(n, x), ref) <= 1e-10


@given(n=st.integers(0, 60), logx=st.floats(-6, 2))
def test_bessel_y_real_accuracy(n, logx):
    x = 10.0**logx
    ref = float(mp.bessely(n, x))
    assume(abs(ref) < 1e290)
    assert rel(bessel_y(n, x), ref) <= 1e-10


@given(n=st.integers(0, 20), r=st.floats(1e-3, 50), theta=st.floats(-math.pi, math.pi))
def test_bessel_j_complex_accuracy(n, r, theta):
    z = r * complex(math.cos(theta), math.sin(theta))
    assume(abs(z.imag) <= 10)
    ref = reference_j(n, z)
    assume(abs(ref) > 1e-290)
    assert rel(bessel_j(n, z), ref) <= 1e-8


@given(n=st.integers(0, 1), r=st.floats(1e-3, 200), theta=st.floats(-math.pi / 2, 0))
def test_hankel_lower_half_plane_accuracy(n, r, theta):
    z = r * complex(math.cos(theta), math.sin(theta))
    assume(z.real > 0 and abs(z.imag) <= 10)
    assert rel(hankel2(n, z), complex(mp.hankel2(n, z))) <= 1e-8


@given(x=st.floats(1e-3, 999.0))
def test_vectorised_kernel_matches_scalar_path(x):
    h0, h1 = hankel2_01(np.array([x]))
    assert rel(h0[0], hankel2(0, x)) <= 1e-10
    assert rel(h1[0], hankel2(1, x)) <= 1e-10


# ---------------------------------------------------------------------------
# domain errors
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("x", [0.0, -1.0])
def test_y_rejects_nonpositive(x):
    with pytest.raises(SpecialFunctionError):
        bessel_y(0, x)


def test_hankel_rejects_origin():
    with pytest.raises(SpecialFunctionError):
        hankel2(0, 0.0)


@pytest.mark.parametrize("n", [-1, 201, 1.5])
def test_order_out_of_range(n):
    with pytest.raises(SpecialFunctionError):
        bessel_j(n, 1.0)


def test_argument_out_of_range():
    with pytest.raises(SpecialFunctionError):
        bessel_j(0, 2e4)
    with pytest.raises(SpecialFunctionError):
        bessel_j(0, float("nan"))


def test_vector_inputs_keep_shape():
    x = np.linspace(0.5, 30, 12).reshape(3, 4)
    assert bessel_j(2, x).shape == (3, 4)
    assert bessel_y(2, x).shape == (3, 4)
    assert bessel_j(2, x)[1, 2] == pytest.approx(bessel_j(2, x[1, 2]), rel=1e-13)
