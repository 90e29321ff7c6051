"""Boundary operators for the single-source (differential admittance) formulation.

Time convention is exp(+i omega t). The 2D Green function

    G(r, r') = -(i/4) H0^(2)(k |r - r'|),   (laplacian + k^2) G = -delta,

gives the interior boundary identity at a collocation point r_i

    1/2 E(r_i) = sum_j [i omega mu int_j G] H_t,j - sum_j [int_j dG/dn'] E_j

i.e. ``P @ H = U @ E`` with ``U = I/2 + D``, where ``H_t = (1/(i omega mu)) dE/dn``
is the tangential magnetic field along ``t = z x n``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .specfun import EULER_GAMMA, hankel2_01

logger = logging.getLogger(__name__)

C0 = 299_792_458.0
MU0 = 1.25663706212e-6
EPS0 = 1.0 / (MU0 * C0**2)

DEFAULT_QUADRATURE_ORDER = 4
NEAR_QUADRATURE_ORDER = 16
# source segments whose midpoint is closer than this many segment lengths to
# the collocation point are integrated with NEAR_QUADRATURE_ORDER points
NEAR_PAIR_FACTOR = 2.5
SELF_TERM_ORDER = 20
CONDITION_LIMIT = 1e14
_CHUNK_PAIRS = 400_000


class SingularOperatorError(RuntimeError):
    """A dense solve hit a (numerically) singular matrix."""

    def __init__(self, message: str, condition: float = math.inf, **context):
        super().__init__(message)
        self.condition = condition
        self.context = context


@dataclass(frozen=True)
class Medium:
    """Homogeneous isotropic medium (relative eps, relative mu, conductivity S/m)."""

    eps_r: float = 1.0
    mu_r: float = 1.0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if not self.eps_r > 0 or not self.mu_r > 0 or not self.sigma >= 0:
            raise ValueError(f"invalid medium parameters {self}")

    @property
    def mu(self) -> float:
        return MU0 * self.mu_r

    def permittivity(self, omega: float) -> complex:
        return EPS0 * self.eps_r - 1j * self.sigma / omega

    def wavenumber(self, omega: float) -> complex:
        """Complex wavenumber on the decaying branch (Re k >= 0, Im k <= 0)."""
        k = omega * np.sqrt(complex(self.mu * self.permittivity(omega)))
        if k.real < 0:
            k = -k
        return complex(k)

    def impedance(self, omega: float) -> complex:
        return complex(omega * self.mu / self.wavenumber(omega))

    @property
    def is_lossless(self) -> bool:
        return self.sigma == 0


FREE_SPACE = Medium()


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------
def _separation(r, rp):
    d = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    rho = np.hypot(d[..., 0], d[..., 1])
    if np.any(rho == 0):
        raise ZeroDivisionError("Green function is singular at coincident points")
    return d, rho


def green_interior(k: complex, r, rp):
    """G(r, r') = -(i/4) H0^(2)(k |r - r'|)."""
    _, rho = _separation(r, rp)
    h0, _ = hankel2_01(k * rho)
    return -0.25j * h0


def green_normal_derivative(k: complex, r, rp, normal_at_rp):
    """dG/dn' at the source point: -(i k / 4) H1^(2)(k rho) (rho_hat . n'),  rho_hat = (r - r')/rho."""
    d, rho = _separation(r, rp)
    _, h1 = hankel2_01(k * rho)
    cos = np.sum(d * np.asarray(normal_at_rp, dtype=float), axis=-1) / rho
    return -0.25j * k * h1 * cos


def green_observation_derivative(k: complex, r, rp, normal_at_r):
    """dG/dn at the observation point: +(i k / 4) H1^(2)(k rho) (rho_hat . n)."""
    d, rho = _separation(r, rp)
    _, h1 = hankel2_01(k * rho)
    cos = np.sum(d * np.asarray(normal_at_r, dtype=float), axis=-1) / rho
    return 0.25j * k * h1 * cos


# ---------------------------------------------------------------------------
# Panel quadrature
# ---------------------------------------------------------------------------
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_integrals(k, obs, a, b, order, obs_normals=None, subdivisions=1, derivatives=True):
    """Integrals over straight panels a->b for paired observation points.

    Returns (S, D, Dt): int G, int dG/dn' and int dG/dn_obs, each of shape (P,).
    ``Dt`` is None when ``obs_normals`` is None; D and Dt are None when
    ``derivatives`` is False.
    """
    t, w = _gauss(order)
    if subdivisions > 1:
        t = ((np.arange(subdivisions)[:, None] + t[None, :]) / subdivisions).ravel()
        w = np.tile(w, subdivisions) / subdivisions
    edge = b - a
    length = np.hypot(edge[:, 0], edge[:, 1])
    tangent = edge / length[:, None]
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    nodes = a[:, None, :] + t[None, :, None] * edge[:, None, :]
    d = obs[:, None, :] - nodes
    rho = np.hypot(d[..., 0], d[..., 1])
    h0, h1 = hankel2_01(k * rho)
    lw = length[:, None] * w[None, :]
    S = np.sum(-0.25j * h0 * lw, axis=1)
    if not derivatives:
        return S, None, None
    cos_src = np.einsum("pqc,pc->pq", d, normal) / rho
    D = np.sum(-0.25j * k * h1 * cos_src * lw, axis=1)
    Dt = None
    if obs_normals is not None:
        cos_obs = np.einsum("pqc,pc->pq", d, obs_normals) / rho
        Dt = np.sum(0.25j * k * h1 * cos_obs * lw, axis=1)
    return S, D, Dt


def self_term_single_layer(k: complex, length: float | np.ndarray) -> np.ndarray:
    """int G over a flat segment, observed at its own midpoint.

    The logarithmic part of H0^(2) is integrated in closed form,

        -(i/4) l [1 - i (2/pi) (ln(k l / 4) + gamma - 1)],

    and the smooth remainder G - G_log by Gauss-Legendre after the
    substitution s = (l/2) t^2 that flattens its s^2 ln s behaviour.
    """
    length = np.atleast_1d(np.asarray(length, dtype=float))
    analytic = -0.25j * length * (1 - 1j * (2 / np.pi) * (np.log(k * length / 4) + EULER_GAMMA - 1))
    t, w = _gauss(SELF_TERM_ORDER)
    half = 0.5 * length[:, None]
    s = half * t[None, :] ** 2
    jac = 2 * half * t[None, :]
    h0, _ = hankel2_01(k * s)
    g = -0.25j * h0
    g_log = -0.25j - (np.log(k * s / 2) + EULER_GAMMA) / (2 * np.pi)
    remainder = 2 * np.sum((g - g_log) * jac * w[None, :], axis=1)
    return analytic + remainder


@dataclass(frozen=True)
class BoundaryIntegrals:
    """Collocation integrals of the three kernels over every segment.

    ``S[i, j] = int_j G(r_i, r') dl'``, ``D[i, j] = int_j dG/dn'`` and
    ``Dt[i, j] = int_j dG/dn_i``; the flat self-segment contributes zero to
    both derivative kernels.
    """

    k: complex
    S: np.ndarray
    D: np.ndarray
    Dt: np.ndarray


def boundary_integrals(starts, ends, k: complex, order: int = DEFAULT_QUADRATURE_ORDER) -> BoundaryIntegrals:
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    n = len(starts)
    mids = 0.5 * (starts + ends)
    edge = ends - starts
    lengths = np.hypot(edge[:, 0], edge[:, 1])
    tangents = edge / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

    S = np.empty((n, n), dtype=complex)
    D = np.empty((n, n), dtype=complex)
    Dt = np.empty((n, n), dtype=complex)
    rows_per_chunk = max(1, _CHUNK_PAIRS // (n * order))
    cols = np.arange(n)
    for r0 in range(0, n, rows_per_chunk):
        rows = np.arange(r0, min(n, r0 + rows_per_chunk))
        ii = np.repeat(rows, n)
        jj = np.tile(cols, len(rows))
        s, d, dt = _panel_integrals(k, mids[ii], starts[jj], ends[jj], order, obs_normals=normals[ii])
        S[rows] = s.reshape(len(rows), n)
        D[rows] = d.reshape(len(rows), n)
        Dt[rows] = dt.reshape(len(rows), n)

    centre_dist = np.hypot(*(mids[:, None, :] - mids[None, :, :]).transpose(2, 0, 1))
    near = centre_dist < NEAR_PAIR_FACTOR * lengths[None, :]
    np.fill_diagonal(near, False)
    if order < NEAR_QUADRATURE_ORDER and np.any(near):
        ii, jj = np.nonzero(near)
        s, d, dt = _panel_integrals(
            k, mids[ii], starts[jj], ends[jj], NEAR_QUADRATURE_ORDER, obs_normals=normals[ii]
        )
        S[ii, jj], D[ii, jj], Dt[ii, jj] = s, d, dt

    diag = np.arange(n)
    S[diag, diag] = self_term_single_layer(k, lengths)
    D[diag, diag] = 0.0
    Dt[diag, diag] = 0.0
    return BoundaryIntegrals(k=k, S=S, D=D, Dt=Dt)


def green_gradient(k: complex, r, rp) -> np.ndarray:
    """grad_r G(r, r') = (i k / 4) H1^(2)(k rho) rho_hat, shape (..., 2)."""
    d, rho = _separation(r, rp)
    _, h1 = hankel2_01(k * rho)
    return (0.25j * k * h1 / rho)[..., None] * d


def hypersingular_matrix(starts, ends, integrals: BoundaryIntegrals) -> np.ndarray:
    """d/dn_i of the double layer of unit pulses, collocated at midpoints.

    For piecewise-constant densities the tangential-derivative (Maue) form
    reduces to point evaluations at segment end points,

        N[i, j] = k^2 (n_i . n_j) int_j G + t_i . [grad G(r_i, a_j) - grad G(r_i, b_j)],

    which stays finite on the diagonal because every end point lies half a
    segment away from the collocation point.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    edge = ends - starts
    tangents = edge / np.hypot(edge[:, 0], edge[:, 1])[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    mids = 0.5 * (starts + ends)
    k = integrals.k
    grad = green_gradient(k, mids[:, None, :], starts[None, :, :]) - green_gradient(
        k, mids[:, None, :], ends[None, :, :]
    )
    return k**2 * (normals @ normals.T) * integrals.S + np.einsum("ic,ijc->ij", tangents, grad)


def contour_integrals(contour, k: complex, order: int = DEFAULT_QUADRATURE_ORDER) -> BoundaryIntegrals:
    return boundary_integrals(contour.starts, contour.ends, k, order)


def potential_matrices(starts, ends, k: complex, points, derivatives: bool = True,
                       order: int = DEFAULT_QUADRATURE_ORDER):
    """Single- and double-layer matrices (M, N) at off-boundary field points.

    Field points closer than 3 segment lengths to a segment use a composite
    8 x 8-point rule on that segment; callers must keep points out of the
    near-boundary band where even that is inaccurate.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    m, n = len(pts), len(starts)
    lengths = np.hypot(*(ends - starts).T)
    S = np.empty((m, n), dtype=complex)
    D = np.empty((m, n), dtype=complex) if derivatives else None
    rows_per_chunk = max(1, _CHUNK_PAIRS // (n * order))
    cols = np.arange(n)
    for r0 in range(0, m, rows_per_chunk):
        rows = np.arange(r0, min(m, r0 + rows_per_chunk))
        ii = np.repeat(rows, n)
        jj = np.tile(cols, len(rows))
        s, d, _ = _panel_integrals(k, pts[ii], starts[jj], ends[jj], order, derivatives=derivatives)
        S[rows] = s.reshape(len(rows), n)
        if derivatives:
            D[rows] = d.reshape(len(rows), n)

    mids = 0.5 * (starts + ends)
    centre_dist = np.hypot(*(pts[:, None, :] - mids[None, :, :]).transpose(2, 0, 1))
    near = centre_dist < 3.0 * lengths[None, :]
    if np.any(near):
        ii, jj = np.nonzero(near)
        s, d, _ = _panel_integrals(k, pts[ii], starts[jj], ends[jj], 8, subdivisions=8,
                                   derivatives=derivatives)
        S[ii, jj] = s
        if derivatives:
            D[ii, jj] = d
    return S, D


# ---------------------------------------------------------------------------
# Admittance operators
# ---------------------------------------------------------------------------
def estimate_condition(lu_piv, anorm: float) -> float:
    """1-norm condition estimate from an LU factorisation (LAPACK gecon)."""
    lu, _ = lu_piv
    gecon = scipy.linalg.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0 or rcond == 0:
        return math.inf
    return 1.0 / rcond


def factorize(matrix: np.ndarray, what: str, **context):
    """LU with partial pivoting plus a condition estimate; raises when singular."""
    if not np.all(np.isfinite(matrix)):
        raise SingularOperatorError(f"{what}: non-finite entries", **context)
    anorm = float(np.max(np.sum(np.abs(matrix), axis=0)))
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu_piv = scipy.linalg.lu_factor(matrix, check_finite=False)
        except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError) as exc:
            raise SingularOperatorError(f"{what}: singular matrix ({exc})", **context) from exc
    cond = estimate_condition(lu_piv, anorm)
    if cond > CONDITION_LIMIT:
        ctx = ", ".join(f"{k}={v}" for k, v in context.items())
        raise SingularOperatorError(f"{what}: condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:g} ({ctx})",
                                    condition=cond, **context)
    return lu_piv, cond


def assemble_PU(contour, medium: Medium, omega: float, order: int = DEFAULT_QUADRATURE_ORDER,
                integrals: BoundaryIntegrals | None = None):
    """Matrices of ``P H = U E`` for one medium filling the contour interior."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    k = medium.wavenumber(omega)
    if integrals is None:
        integrals = contour_integrals(contour, k, order)
    P = 1j * omega * medium.mu * integrals.S
    U = 0.5 * np.eye(len(P)) + integrals.D
    return P, U


def surface_admittance(P: np.ndarray, U: np.ndarray, **context):
    """Solve ``P Y = U`` by LU. Returns (Y, condition estimate, relative residual)."""
    lu_piv, cond = factorize(P, "P", **context)
    Y = scipy.linalg.lu_solve(lu_piv, U, check_finite=False)
    residual = float(np.linalg.norm(P @ Y - U) / np.linalg.norm(U))
    return Y, cond, residual


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Dense operators of one scatterer at one frequency.

    ``Y`` maps boundary E to interior tangential H for the object medium,
    ``Y_hat`` the same with the background medium filling the contour, and
    ``Y_s = Y - Y_hat`` maps E to the equivalent electric current.
    """

    omega: float
    obj: Medium
    background: Medium
    P: np.ndarray
    U: np.ndarray
    Y: np.ndarray
    P_hat: np.ndarray
    U_hat: np.ndarray
    Y_hat: np.ndarray
    Y_s: np.ndarray
    interior: BoundaryIntegrals
    exterior: BoundaryIntegrals
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.P)


def differential_admittance(contour, obj: Medium, background: Medium, omega: float,
                            order: int = DEFAULT_QUADRATURE_ORDER) -> OperatorSet:
    """Assemble P, U, Y for the object and background fillings and Y_s = Y - Y_hat."""
    freq = omega / (2 * np.pi)
    k1 = obj.wavenumber(omega)
    k0 = background.wavenumber(omega)
    inner = contour_integrals(contour, k1, order)
    outer = inner if k0 == k1 else contour_integrals(contour, k0, order)
    P, U = assemble_PU(contour, obj, omega, integrals=inner)
    P_hat, U_hat = assemble_PU(contour, background, omega, integrals=outer)
    Y, cond, res = surface_admittance(P, U, medium="object", frequency_hz=freq, eps_r=obj.eps_r)
    if obj == background:
        Y_hat, cond_hat, res_hat = Y, cond, res
    else:
        Y_hat, cond_hat, res_hat = surface_admittance(
            P_hat, U_hat, medium="background", frequency_hz=freq, eps_r=background.eps_r
        )
    logger.debug("admittance at %.6g Hz: cond(P)=%.3e cond(P_hat)=%.3e", freq, cond, cond_hat)
    return OperatorSet(
        omega=omega, obj=obj, background=background,
        P=P, U=U, Y=Y, P_hat=P_hat, U_hat=U_hat, Y_hat=Y_hat, Y_s=Y - Y_hat,
        interior=inner, exterior=outer,
        diagnostics={"cond_P": cond, "cond_P_hat": cond_hat,
                     "residual_Y": res, "residual_Y_hat": res_hat},
    )
