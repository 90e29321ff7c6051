"""Cylinder functions J_n, Y_n and H_n^(2) in double precision.

Orders 0 and 1 are evaluated for complex arguments with an ascending power
series inside ``SWITCH_RADIUS`` and the Hankel asymptotic expansion outside.
Higher orders come from recurrences: Miller's downward recurrence for J
(normalised against J0 or J1), upward recurrence for Y and H^(2).

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SWITCH_RADIUS = 12.0
MAX_ORDER = 200
MAX_ABS_ARG = 1.0e4

_SERIES_TERMS = 36
_DECAY_SWITCH = 5.0
_SHIFT_RADIUS = 18.0
_ADDITION_TERMS = 90
_ASYMPTOTIC_TERMS = 24  # highest coefficient index; must stay below 2*SWITCH_RADIUS

# harmonic numbers H_k, k = 0.._SERIES_TERMS
_HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, _SERIES_TERMS + 2))])


class SpecialFunctionError(ValueError):
    """Argument or order outside the supported domain."""


def _asarray(z):
    return np.asarray(z, dtype=complex)


def _check_order(n: int) -> None:
    if int(n) != n or n < 0 or n > MAX_ORDER:
        raise SpecialFunctionError(f"order must be an integer in [0, {MAX_ORDER}], got {n}")


def _check_arg(z: np.ndarray) -> None:
    if not np.all(np.isfinite(z)):
        raise SpecialFunctionError("non-finite argument")
    if np.any(np.abs(z) >= MAX_ABS_ARG):
        raise SpecialFunctionError(f"|z| must be < {MAX_ABS_ARG:g}")


def _restore(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return values[()]
    return values


# ---------------------------------------------------------------------------
# Orders 0 and 1: series / asymptotic building blocks
# ---------------------------------------------------------------------------
def _factorials(n: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(n + 2)], dtype=float)


_FACT = _factorials(_SERIES_TERMS)
# ascending series in q = -z^2/4:
#   J0 = sum C0_k q^k, J1 = (z/2) sum C1_k q^k,
#   Y0 = (2/pi)[(ln(z/2) + gamma) J0 + sum D0_k q^k],
#   Y1 = -2/(pi z) + (2/pi) ln(z/2) J1 - (z/(2 pi)) sum D1_k q^k
_C0 = 1.0 / _FACT[: _SERIES_TERMS + 1] ** 2
_C1 = 1.0 / (_FACT[: _SERIES_TERMS + 1] * _FACT[1 : _SERIES_TERMS + 2])
_D0 = -_HARMONIC[: _SERIES_TERMS + 1] * _C0
_D1 = (_HARMONIC[: _SERIES_TERMS + 1] + _HARMONIC[1 : _SERIES_TERMS + 2] - 2.0 * EULER_GAMMA) * _C1


def _series_length(radius: float) -> int:
    """Number of series terms after which (r/2)^(2k) / (k!)^2 < 1e-18."""
    q = 0.25 * radius * radius
    term = 1.0
    for k in range(1, _SERIES_TERMS + 1):
        term *= q / (k * k)
        if term < 1e-18:
            return k + 1
    return _SERIES_TERMS + 1


def _horner(coeffs: np.ndarray, x: np.ndarray, nterms: int) -> np.ndarray:
    acc = np.full_like(x, coeffs[nterms - 1])
    for c in coeffs[nterms - 2 :: -1]:
        acc *= x
        acc += c
    return acc


def _series_jy01(z: np.ndarray, with_y: bool = True):
    nterms = _series_length(float(np.max(np.abs(z)))) if z.size else 1
    q = -0.25 * z * z
    j0 = _horner(_C0, q, nterms)
    j1 = 0.5 * z * _horner(_C1, q, nterms)
    if not with_y:
        return j0, j1, None, None
    log_half = np.log(0.5 * z)
    y0 = (2.0 / np.pi) * ((log_half + EULER_GAMMA) * j0 + _horner(_D0, q, nterms))
    y1 = -2.0 / (np.pi * z) + (2.0 / np.pi) * log_half * j1 - (0.5 / np.pi) * z * _horner(_D1, q, nterms)
    return j0, j1, y0, y1


def _series_j01(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    j0, j1, _, _ = _series_jy01(z, with_y=False)
    return j0, j1


def _asymptotic_coeffs(order: int) -> np.ndarray:
    """a_k(order) / 8^k for k = 0.._ASYMPTOTIC_TERMS."""
    mu = 4.0 * order * order
    out = np.empty(_ASYMPTOTIC_TERMS + 1)
    out[0] = 1.0
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        out[k] = out[k - 1] * (mu - (2 * k - 1) ** 2) / (8.0 * k)
    return out


_ASYM = {n: _asymptotic_coeffs(n) for n in (0, 1)}


def _asymptotic_pq(order: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = _ASYM[order]
    zmin = float(np.min(np.abs(z))) if z.size else SWITCH_RADIUS
    nk = _ASYMPTOTIC_TERMS
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        if abs(a[k]) / zmin**k < 1e-18:
            nk = k
            break
    # P = sum_m (-1)^m a_2m z^-2m,  Q = sum_m (-1)^m a_(2m+1) z^-(2m+1)
    alt_even = a[0 : nk + 1 : 2] * (-1.0) ** np.arange(len(a[0 : nk + 1 : 2]))
    alt_odd = a[1 : nk + 1 : 2] * (-1.0) ** np.arange(len(a[1 : nk + 1 : 2]))
    w = 1.0 / (z * z)
    p = _horner(alt_even, w, len(alt_even))
    q = _horner(alt_odd, w, len(alt_odd)) / z if len(alt_odd) else np.zeros_like(z)
    return p, q


def _asymptotic_jy01(z: np.ndarray):
    amp = np.sqrt(2.0 / (np.pi * z))
    out = []
    for order in (0, 1):
        p, q = _asymptotic_pq(order, z)
        chi = z - (0.5 * order + 0.25) * np.pi
        c, s = np.cos(chi), np.sin(chi)
        out.append((amp * (p * c - q * s), amp * (p * s + q * c)))
    (j0, y0), (j1, y1) = out
    return j0, j1, y0, y1


def _asymptotic_h2_01(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    amp = np.sqrt(2.0 / (np.pi * z))
    phase = np.exp(-1j * z)
    out = []
    for order in (0, 1):
        p, q = _asymptotic_pq(order, z)
        # exp(-i chi) with chi = z - (order/2 + 1/4) pi
        rot = np.exp(1j * (0.5 * order + 0.25) * np.pi)
        out.append(amp * (p - 1j * q) * (phase * rot))
    return out[0], out[1]


def _reflect_left(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map Re z < 0 into the right half plane for the asymptotic branch."""
    left = z.real < 0
    return np.where(left, -z, z), left


def bessel_jy01(z):
    """Return (J0, J1, Y0, Y1) for complex ``z`` (Y requires ``z`` off the cut)."""
    z = _asarray(z)
    j0 = np.empty_like(z)
    j1 = np.empty_like(z)
    y0 = np.empty_like(z)
    y1 = np.empty_like(z)
    small = np.abs(z) <= SWITCH_RADIUS
    if np.any(small):
        j0[small], j1[small], y0[small], y1[small] = _series_jy01(z[small])
    big = ~small
    if np.any(big):
        zb, left = _reflect_left(z[big])
        a0, a1, b0, b1 = _asymptotic_jy01(zb)
        # J0 even, J1 odd; Y is only used for Re z >= 0 here
        a1 = np.where(left, -a1, a1)
        j0[big], j1[big], y0[big], y1[big] = a0, a1, b0, b1
    return j0, j1, y0, y1


def _addition_h2_01(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """H0, H1 via Neumann's addition theorem from a point further out on the ray.

    C_nu(u + v) = sum_k C_{nu-k}(u) J_k(v) for |v| < |u|, with u on the ray of
    z at radius _SHIFT_RADIUS where the asymptotic branch is exact to rounding.
    """
    u = z * (_SHIFT_RADIUS / np.abs(z))
    v = z - u
    kmax = _ADDITION_TERMS
    hu = np.empty((kmax + 2,) + z.shape, dtype=complex)
    hu[0], hu[1] = _asymptotic_h2_01(u)
    for k in range(1, kmax + 1):
        hu[k + 1] = (2.0 * k / u) * hu[k] - hu[k - 1]
    jv = np.array([_series_jn(k, v) for k in range(kmax + 1)])
    sign = np.where(np.arange(kmax + 1) % 2 == 1, -1.0, 1.0)[:, None]
    # H_{-k} = (-1)^k H_k and J_{-k} = (-1)^k J_k
    h0 = hu[0] * jv[0] + 2.0 * np.sum(sign[1:] * hu[1 : kmax + 1] * jv[1:], axis=0)
    # nu = 1: k >= 1 pairs H_{1-k} J_k, k <= 0 pairs H_{1+k} J_{-k}
    h1 = hu[1] * jv[0] + hu[0] * jv[1]
    for k in range(2, kmax + 1):
        h1 = h1 + (-1) ** (k - 1) * hu[k - 1] * jv[k]
    for k in range(1, kmax + 1):
        h1 = h1 + (-1) ** k * hu[k + 1] * jv[k]
    return h0, h1


_SERIES_BINS = (0.0, 2.0, 6.0, SWITCH_RADIUS)
_ASYMPTOTIC_BINS = (SWITCH_RADIUS, 20.0, 40.0, np.inf)


def _binned(func, z: np.ndarray, size: np.ndarray, edges) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``func`` per |z| bin so term counts follow each bin's extreme |z|."""
    out0 = np.empty(z.shape, dtype=complex)
    out1 = np.empty(z.shape, dtype=complex)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (size > lo) & (size <= hi)
        if np.any(sel):
            out0[sel], out1[sel] = func(z[sel])
    return out0, out1


def _series_h2_01(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    j0, j1, y0, y1 = _series_jy01(z)
    return j0 - 1j * y0, j1 - 1j * y1


def hankel2_01(z):
    """Return (H0^(2)(z), H1^(2)(z)) for complex ``z`` with Re z >= 0, z != 0.

    This is the vectorised kernel path used by the boundary operators; it
    performs no domain validation beyond what numpy does. Real input is
    evaluated in real arithmetic.
    """
    z = np.asarray(z)
    if not np.iscomplexobj(z) or not np.any(z.imag):
        z = np.asarray(z.real if np.iscomplexobj(z) else z, dtype=float)
        size = np.abs(z)
        h0 = np.empty(z.shape, dtype=complex)
        h1 = np.empty(z.shape, dtype=complex)
        small = size <= SWITCH_RADIUS
        if np.any(small):
            h0[small], h1[small] = _binned(_series_h2_01, z[small], size[small], _SERIES_BINS)
        if np.any(~small):
            big = ~small
            h0[big], h1[big] = _binned(_asymptotic_h2_01, z[big], size[big], _ASYMPTOTIC_BINS)
        return h0, h1
    z = z.astype(complex)
    h0 = np.empty_like(z)
    h1 = np.empty_like(z)
    size = np.abs(z)
    # J - iY cancels like exp(2|Im z|) in the lower half plane
    decay = np.maximum(-z.imag, 0.0)
    big = size > SWITCH_RADIUS
    shifted = ~big & (decay > _DECAY_SWITCH)
    small = ~big & ~shifted
    if np.any(small):
        h0[small], h1[small] = _binned(_series_h2_01, z[small], size[small], _SERIES_BINS)
    if np.any(shifted):
        h0[shifted], h1[shifted] = _addition_h2_01(z[shifted])
    if np.any(big):
        h0[big], h1[big] = _binned(_asymptotic_h2_01, z[big], size[big], _ASYMPTOTIC_BINS)
    return h0, h1


# ---------------------------------------------------------------------------
# Arbitrary integer order
# ---------------------------------------------------------------------------
def _series_jn(n: int, z: np.ndarray) -> np.ndarray:
    q = -0.25 * z * z
    term = np.ones_like(z)
    total = term.copy()
    for k in range(1, _SERIES_TERMS + n // 4 + 1):
        term = term * q / (k * (n + k))
        total += term
    if n == 0:
        return total
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        log_pref = n * np.log(0.5 * z) - math.lgamma(n + 1)
        pref = np.where(z == 0, 0.0, np.exp(log_pref))
    return pref * total


def _miller_j(nmax: int, z: np.ndarray) -> np.ndarray:
    """J_0..J_nmax for |z| > SWITCH_RADIUS by normalised downward recurrence."""
    m = max(nmax, int(np.max(np.abs(z))) + 1)
    start = m + 30 + int(6.0 * math.sqrt(m)) + int(2 * np.max(np.abs(z.imag)))
    start += start % 2
    values = np.zeros((nmax + 1,) + z.shape, dtype=complex)
    f_next = np.zeros_like(z)
    f = np.full_like(z, 1e-30)
    inv_z = 1.0 / z
    for k in range(start, 0, -1):
        f_prev = 2.0 * k * inv_z * f - f_next
        f_next, f = f, f_prev
        if k - 1 <= nmax:
            values[k - 1] = f
        big = np.abs(f) > 1e250
        if np.any(big):
            f = np.where(big, f * 1e-250, f)
            f_next = np.where(big, f_next * 1e-250, f_next)
            with np.errstate(under="ignore"):
                values[:, big] *= 1e-250
    j0, j1, _, _ = bessel_jy01(z)
    use_j0 = np.abs(j0) >= np.abs(j1)
    scale = np.where(use_j0, j0 / values[0], j1 / values[1])
    return values * scale


def bessel_j_orders(nmax: int, z):
    """Return an array ``J[n]`` of J_n(z) for n = 0..nmax (leading axis = order)."""
    _check_order(nmax)
    za = _asarray(z)
    _check_arg(za)
    za = np.atleast_1d(za)
    out = np.empty((nmax + 1,) + za.shape, dtype=complex)
    small = np.abs(za) <= SWITCH_RADIUS
    if np.any(small):
        zs = za[small]
        for n in range(nmax + 1):
            out[n][small] = _series_jn(n, zs)
    big = ~small
    if np.any(big):
        zb, left = _reflect_left(za[big])
        vals = _miller_j(max(nmax, 1), zb)[: nmax + 1]
        parity = np.where(np.arange(nmax + 1) % 2 == 1, -1.0, 1.0)[:, None]
        vals = np.where(left[None, :], parity * vals, vals)
        out[:, big] = vals
    if np.ndim(z) == 0:
        out = out[:, 0]
    if not np.iscomplexobj(z):
        out = out.real
    return out


def bessel_j(n: int, z):
    """Bessel function of the first kind J_n(z), integer n >= 0, complex z."""
    _check_order(n)
    return bessel_j_orders(int(n), z)[int(n)]


def bessel_y_orders(nmax: int, x) -> np.ndarray:
    """Return ``Y[n]`` = Y_n(x) for n = 0..nmax, real x > 0, by upward recurrence."""
    _check_order(nmax)
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa <= 0):
        raise SpecialFunctionError("Y_n requires real x > 0")
    _check_arg(xa)
    xa = np.atleast_1d(xa)
    _, _, y0, y1 = bessel_jy01(xa.astype(complex))
    out = np.empty((nmax + 1,) + xa.shape)
    out[0] = y0.real
    if nmax >= 1:
        out[1] = y1.real
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, nmax):
            out[n + 1] = (2.0 * n / xa) * out[n] - out[n - 1]
    if not np.all(np.isfinite(out)):
        raise SpecialFunctionError(f"Y_n overflows double precision for order <= {nmax} at this x")
    if np.ndim(x) == 0:
        out = out[:, 0]
    return out


def bessel_y(n: int, x):
    """Bessel function of the second kind Y_n(x) for real x > 0."""
    _check_order(n)
    return bessel_y_orders(int(n), x)[int(n)]


def hankel2(n: int, z):
    """Hankel function of the second kind H_n^(2)(z) = J_n(z) - i Y_n(z).

    Real arguments of any supported order are built from J_n and Y_n
    directly. Complex arguments use H0/H1 and the (stable) upward recurrence.
    """
    _check_order(n)
    za = _asarray(z)
    _check_arg(za)
    if np.any(za == 0):
        raise SpecialFunctionError("H_n^(2) is singular at z = 0")
    if np.all(za.imag == 0) and np.all(za.real > 0):
        x = za.real if np.ndim(z) else float(za.real)
        return bessel_j(n, x) - 1j * bessel_y(n, x)
    if np.any(za.real < 0):
        raise SpecialFunctionError("H_n^(2) is only provided for Re z >= 0")
    h0, h1 = hankel2_01(za)
    if n == 0:
        return _restore(h0, z)
    h_prev, h = h0, h1
    for k in range(1, int(n)):
        h_prev, h = h, (2.0 * k / za) * h - h_prev
    return _restore(h, z)
