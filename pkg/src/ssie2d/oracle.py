"""Eigenfunction (Mie) series for a homogeneous circular cylinder, TM incidence.

For a plane wave travelling along ``angle`` and phi' = phi - angle,

    exterior:  E_z = E0 sum_n i^-n [J_n(k0 rho) + a_n H_n^(2)(k0 rho)] e^{i n phi'}
    interior:  E_z = E0 sum_n i^-n b_n J_n(k1 rho) e^{i n phi'}

with (a_n, b_n) fixed per mode by continuity of E_z and of
H_phi = (1/(i omega mu)) dE_z/drho at rho = R. Lossless media only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import Medium
from .solver import RcsCurve
from .specfun import bessel_j_orders, bessel_y_orders

TAIL_TOLERANCE = 1e-12
_EXTRA_ORDERS = 8


class OracleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MieSolution:
    """Mode coefficients for orders 0..n_max (a_-n = a_n, b_-n = b_n).

    ``n_max`` is the smallest order (in steps of 4) at which both the
    scattered coefficients and the interior terms ``b_n J_n(k1 R)`` have
    fallen below ``TAIL_TOLERANCE`` relative to their peaks.
    """

    radius: float
    obj: Medium
    background: Medium
    frequency: float
    n_max: int
    a: np.ndarray
    b: np.ndarray
    center: tuple[float, float] = (0.0, 0.0)
    amplitude: complex = 1.0
    angle: float = 0.0
    residual: float = 0.0

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.frequency

    @property
    def k0(self) -> float:
        return self.background.wavenumber(self.omega).real

    @property
    def k1(self) -> float:
        return self.obj.wavenumber(self.omega).real

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def full(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients indexed by ``orders`` (-n_max..n_max)."""
        return np.concatenate([coeffs[:0:-1], coeffs])


def _derivatives(values: np.ndarray) -> np.ndarray:
    """C_n' from C_0..C_{m}: C_0' = -C_1, C_n' = (C_{n-1} - C_{n+1}) / 2."""
    d = np.empty_like(values[:-1])
    d[0] = -values[1]
    d[1:] = 0.5 * (values[:-2] - values[2:])
    return d


def _solve_modes(n_max, radius, k0, k1, mu0, mu1):
    x0, x1 = k0 * radius, k1 * radius
    j0 = bessel_j_orders(n_max + 1, x0)
    y0 = bessel_y_orders(n_max + 1, x0)
    j1 = bessel_j_orders(n_max + 1, x1)
    h0 = j0 - 1j * y0
    dj0, dh0, dj1 = _derivatives(j0), _derivatives(h0), _derivatives(j1)
    j0, h0, j1 = j0[:-1], h0[:-1], j1[:-1]
    a = np.empty(n_max + 1, dtype=complex)
    b = np.empty(n_max + 1, dtype=complex)
    worst = 0.0
    for n in range(n_max + 1):
        M = np.array([[-h0[n], j1[n]],
                      [-(k0 / mu0) * dh0[n], (k1 / mu1) * dj1[n]]], dtype=complex)
        rhs = np.array([j0[n], (k0 / mu0) * dj0[n]], dtype=complex)
        if abs(np.linalg.det(M)) == 0:
            raise OracleError(f"singular mode system at n={n}")
        sol = np.linalg.solve(M, rhs)
        a[n], b[n] = sol
        scale = np.abs(M) @ np.abs(sol) + np.abs(rhs)
        worst = max(worst, float(np.max(np.abs(M @ sol - rhs) / scale)))
    return a, b, worst, j1


def mie_coefficients(radius: float, obj: Medium, background: Medium, frequency: float,
                     amplitude: complex = 1.0, angle: float = 0.0, center=(0.0, 0.0)) -> MieSolution:
    if not (obj.is_lossless and background.is_lossless):
        raise OracleError("the series oracle covers lossless media only")
    if radius <= 0 or frequency <= 0:
        raise OracleError("radius and frequency must be positive")
    omega = 2 * np.pi * frequency
    k0 = background.wavenumber(omega).real
    k1 = obj.wavenumber(omega).real
    n_max = int(np.ceil(max(k0, k1) * radius)) + _EXTRA_ORDERS
    while True:
        a, b, residual, j1 = _solve_modes(n_max, radius, k0, k1, background.mu, obj.mu)
        if obj == background:
            # no contrast: the exact solution is a_n = 0, b_n = 1; drop the roundoff
            a[:], b[:], residual = 0.0, 1.0, 0.0
        # the exterior series decays with a_n, the interior one with b_n J_n(k1 R)
        inner = np.abs(b * j1)
        peak = np.max(np.abs(a))
        outer_done = peak == 0 or abs(a[-1]) / peak <= TAIL_TOLERANCE
        if outer_done and inner[-1] <= TAIL_TOLERANCE * np.max(inner):
            break
        n_max += 4
        if n_max > 190:
            raise OracleError("mode series failed to converge")
    return MieSolution(radius=radius, obj=obj, background=background, frequency=frequency,
                       n_max=n_max, a=a, b=b, center=tuple(center), amplitude=amplitude,
                       angle=angle, residual=residual)


def _phase_at_center(solution: MieSolution) -> complex:
    """Incident phase at the cylinder centre for a wave referenced to the origin."""
    d = np.array([np.cos(solution.angle), np.sin(solution.angle)])
    return complex(np.exp(-1j * solution.k0 * float(d @ np.asarray(solution.center, dtype=float))))


def mie_field(solution: MieSolution, points) -> np.ndarray:
    """Total E_z at arbitrary points (series chosen by rho vs radius).

    Outside the cylinder the incident plane wave is evaluated in closed form,
    so only the rapidly converging scattered series is truncated at ``n_max``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2) - np.asarray(solution.center)
    rho = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0]) - solution.angle
    n = np.arange(solution.n_max + 1)
    # sum over +-n folds into weights 1 (n = 0) and 2 cos(n phi) (n > 0)
    ang = np.where(n[:, None] == 0, 1.0, 2.0 * np.cos(n[:, None] * phi[None, :]))
    ipow = (1j ** (-n))[:, None]
    out = np.empty(len(pts), dtype=complex)
    inside = rho < solution.radius
    if np.any(inside):
        jn = bessel_j_orders(solution.n_max, solution.k1 * rho[inside])
        out[inside] = np.sum(ipow * solution.b[:, None] * jn * ang[:, inside], axis=0)
    outside = ~inside
    if np.any(outside):
        x = solution.k0 * rho[outside]
        hn = bessel_j_orders(solution.n_max, x) - 1j * bessel_y_orders(solution.n_max, x)
        incident = np.exp(-1j * x * np.cos(phi[outside]))
        out[outside] = incident + np.sum(ipow * solution.a[:, None] * hn * ang[:, outside], axis=0)
    return solution.amplitude * _phase_at_center(solution) * out


def mie_far_sum(solution: MieSolution, angles) -> np.ndarray:
    phi = np.atleast_1d(np.asarray(angles, dtype=float)) - solution.angle
    n = np.arange(solution.n_max + 1)
    w = np.where(n == 0, 1.0, 2.0)
    return np.sum((w * solution.a)[:, None] * np.cos(n[:, None] * phi[None, :]), axis=0)


def mie_scattering_width(solution: MieSolution, angles) -> RcsCurve:
    """sigma(phi) = (4 / k0) |sum_n a_n e^{i n phi'}|^2."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    s = mie_far_sum(solution, angles)
    return RcsCurve(angles=angles, sigma=(4.0 / solution.k0) * np.abs(s) ** 2)


def mie_scattering_cross_width(solution: MieSolution) -> float:
    """(1/2pi) int sigma dphi = (4 / k0) sum_n |a_n|^2."""
    a = solution.a
    return float((4.0 / solution.k0) * (abs(a[0]) ** 2 + 2 * np.sum(np.abs(a[1:]) ** 2)))


def mie_extinction_width(solution: MieSolution) -> float:
    """-(4 / k0) Re sum_n a_n, the forward-amplitude extinction."""
    return float(-(4.0 / solution.k0) * np.real(mie_far_sum(solution, [solution.angle])[0]))
