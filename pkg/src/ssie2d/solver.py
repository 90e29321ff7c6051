"""Combined-field solve for the single equivalent electric current.

With boundary unknowns ``E`` (total E_z at the collocation points), the
current ``J_s = Y_s E`` radiates in the background medium:

    E^s   = L J_s,   L = -i omega mu_b S_b
    H_t^s = K J_s,   K = I/2 - Dt_b          (exterior-side limit)

Matching the exterior total fields to the boundary values ``E`` and
``H_t = Y E`` and blending the two equations with ``alpha`` gives

    [alpha (I - L Y_s) + (1 - alpha) eta (Y - K Y_s)] E
        = alpha E_inc + (1 - alpha) eta H_t,inc.

``Y_s = Y - Y_hat`` and ``Y_hat = P_hat^-1 U_hat`` has a pole whenever the
background medium resonates inside an object's contour, while the products
with the radiation operators do not: the background field that ``Y_hat``
describes vanishes outside its contour, so in the continuum

    L Y_hat = -(I/2 + D_b)          K Y_hat = -N_b / (i omega mu_b)

with ``N_b`` the hypersingular operator. The discrete ``L Y_hat`` equals
``-U_hat`` exactly on an object's own block. ``K Y_hat`` is formed literally
except on the few input directions that excite a near-null singular vector
of ``P_hat`` (singular value below ``resonance_threshold`` times the
smallest value a non-resonant contour produces, ``|omega mu_b| l / 2 pi``);
on that subspace the identity supplies the product. A threshold of zero
gives the literal products everywhere, ``math.inf`` the identities
everywhere.

The pole also sits in ``J_s`` itself (as a current that radiates nothing in
the continuum but not exactly so once discretised), so radiating ``J_s``
directly is fragile near those frequencies. The exterior field is instead
rebuilt from its boundary trace ``g = L Y_s E`` through a combined
double/single-layer density, which is uniquely solvable at every real
frequency:

    (I/2 + D_b + i k0 S_b) phi = g,     E^s = D_b' phi + i k0 S_b' phi.

Both routes describe the same field in the continuum; ``method="current"``
evaluates the literal current radiation.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import geometry
from .geometry import Contour, Region
from .operators import (
    DEFAULT_QUADRATURE_ORDER,
    FREE_SPACE,
    BoundaryIntegrals,
    Medium,
    OperatorSet,
    boundary_integrals,
    differential_admittance,
    factorize,
    hypersingular_matrix,
    potential_matrices,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlaneWave:
    """E_z = amplitude * exp(-i k (x cos(angle) + y sin(angle))); angle is the propagation direction."""

    frequency: float
    amplitude: complex = 1.0
    angle: float = 0.0

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.frequency

    @property
    def direction(self) -> np.ndarray:
        return np.array([np.cos(self.angle), np.sin(self.angle)])

    def field(self, points, background: Medium = FREE_SPACE) -> np.ndarray:
        k0 = background.wavenumber(self.omega)
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return self.amplitude * np.exp(-1j * k0 * (pts @ self.direction))


@dataclass(frozen=True)
class CfieConfig:
    alpha: float = 0.5
    background: Medium = FREE_SPACE
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    # regression aid: use Y_hat instead of Y in the magnetic block
    mfie_uses_background_admittance: bool = False
    # relative to the natural singular-value floor |omega mu_b| l / (2 pi)
    resonance_threshold: float = 3.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.resonance_threshold >= 0.0:
            raise ValueError(f"resonance_threshold must be >= 0, got {self.resonance_threshold}")

    def eta(self, omega: float) -> complex:
        return self.background.impedance(omega)


@dataclass(frozen=True, eq=False)
class BoundarySolution:
    """Boundary field and equivalent current of one CFIE solve.

    ``E``, ``J_s`` and ``H_t`` are concatenated over ``contours``;
    ``offsets[m]:offsets[m + 1]`` is the slice of object ``m``.
    """

    contours: tuple[Contour, ...]
    media: tuple[Medium, ...]
    config: CfieConfig
    wave: PlaneWave
    E: np.ndarray
    J_s: np.ndarray
    H_t: np.ndarray
    operators: tuple[OperatorSet, ...]
    offsets: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    trace: np.ndarray | None = None
    density: np.ndarray | None = None

    @property
    def omega(self) -> float:
        return self.wave.omega

    @property
    def background(self) -> Medium:
        return self.config.background

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate([c.starts for c in self.contours])

    @property
    def ends(self) -> np.ndarray:
        return np.concatenate([c.ends for c in self.contours])

    def object_slice(self, m: int) -> slice:
        return slice(int(self.offsets[m]), int(self.offsets[m + 1]))


@dataclass(frozen=True, eq=False)
class FieldGrid:
    points: np.ndarray
    values: np.ndarray
    region: np.ndarray
    shape: tuple[int, int] | None = None

    @property
    def mask(self) -> np.ndarray:
        """True where the value is valid for error metrics."""
        return self.region != Region.NEAR_BOUNDARY.value


@dataclass(frozen=True, eq=False)
class RcsCurve:
    angles: np.ndarray
    sigma: np.ndarray

    @property
    def sigma_db(self) -> np.ndarray:
        return 10 * np.log10(np.maximum(self.sigma, 1e-20))


# ---------------------------------------------------------------------------
# Incident fields and exterior operators
# ---------------------------------------------------------------------------
def _as_contours(contours) -> tuple[Contour, ...]:
    if isinstance(contours, Contour):
        return (contours,)
    return tuple(contours)


def incident_boundary_fields(contours, wave: PlaneWave, background: Medium = FREE_SPACE):
    """E_z and H_t = H . (z x n) of the plane wave at every collocation point."""
    cs = _as_contours(contours)
    mids = np.concatenate([c.midpoints for c in cs])
    normals = np.concatenate([c.normals for c in cs])
    e_inc = wave.field(mids, background)
    # H_t = (1 / (i omega mu)) dE/dn = -(k_hat . n) E / eta
    eta = background.impedance(wave.omega)
    ht_inc = -(normals @ wave.direction) * e_inc / eta
    return e_inc, ht_inc


def _exterior_integrals(contours, background: Medium, omega: float, order: int) -> BoundaryIntegrals:
    cs = _as_contours(contours)
    starts = np.concatenate([c.starts for c in cs])
    ends = np.concatenate([c.ends for c in cs])
    return boundary_integrals(starts, ends, background.wavenumber(omega), order)


def l_from_integrals(integrals: BoundaryIntegrals, background: Medium, omega: float) -> np.ndarray:
    return -1j * omega * background.mu * integrals.S


def k_from_integrals(integrals: BoundaryIntegrals) -> np.ndarray:
    return 0.5 * np.eye(len(integrals.Dt)) - integrals.Dt


def assemble_L(contours, background: Medium, omega: float, order: int = DEFAULT_QUADRATURE_ORDER):
    """E^s at the collocation points from unit pulse currents: -i omega mu_b int G_b."""
    return l_from_integrals(_exterior_integrals(contours, background, omega, order), background, omega)


def assemble_K(contours, background: Medium, omega: float, order: int = DEFAULT_QUADRATURE_ORDER):
    """Exterior-side tangential H^s from unit pulse currents: I/2 - int dG_b/dn_i."""
    return k_from_integrals(_exterior_integrals(contours, background, omega, order))


# ---------------------------------------------------------------------------
# CFIE solve
# ---------------------------------------------------------------------------
def resonant_subspace(P_hat: np.ndarray, U_hat: np.ndarray, floor: float, threshold: float) -> np.ndarray:
    """Orthonormal basis of the inputs that ``Y_hat`` maps through near-null modes of ``P_hat``.

    With ``P_hat = W diag(s) V^H``, the columns of ``U_hat^H W_b`` for
    ``s_b < threshold * floor`` span the subspace on which ``Y_hat``
    amplifies by ``1 / s_b``. Returns an (n, r) array, r possibly zero.
    """
    W, s, _ = np.linalg.svd(P_hat)
    bad = s < threshold * floor
    if not np.any(bad):
        return np.zeros((len(P_hat), 0), dtype=complex)
    Q, _ = np.linalg.qr(U_hat.conj().T @ W[:, bad])
    return Q


def radiation_products(ops, offsets, L, K, ext: BoundaryIntegrals, starts, ends,
                       background: Medium, omega: float, threshold: float):
    """(L Y_s, K Y_s, resonant ranks), with the Y_hat pole removed as described above.

    Columns of objects made of the background medium are exactly zero.
    """
    n = len(L)
    LY_s = np.zeros((n, n), dtype=complex)
    KY_s = np.zeros((n, n), dtype=complex)
    ranks = []
    KY_hat_identity = None
    for m, o in enumerate(ops):
        cols = slice(offsets[m], offsets[m + 1])
        if o.obj == o.background:
            ranks.append(0)
            continue
        l_mean = float(np.mean(np.hypot(*(ends[cols] - starts[cols]).T)))
        floor = abs(omega * background.mu) * l_mean / (2 * np.pi)
        Q = resonant_subspace(o.P_hat, o.U_hat, floor, threshold)
        ranks.append(Q.shape[1])
        LY_hat = L[:, cols] @ o.Y_hat
        KY_hat = K[:, cols] @ o.Y_hat
        if Q.shape[1]:
            if KY_hat_identity is None:
                KY_hat_identity = -hypersingular_matrix(starts, ends, ext) / (1j * omega * background.mu)
                LY_hat_identity = -(0.5 * np.eye(n) + ext.D)
            Pi = Q @ Q.conj().T
            keep = np.eye(o.n) - Pi
            LY_hat = LY_hat @ keep + LY_hat_identity[:, cols] @ Pi
            KY_hat = KY_hat @ keep + KY_hat_identity[:, cols] @ Pi
        LY_s[:, cols] = L[:, cols] @ o.Y - LY_hat
        KY_s[:, cols] = K[:, cols] @ o.Y - KY_hat
    return LY_s, KY_s, ranks


def layer_coupling(background: Medium, omega: float) -> float:
    return float(abs(background.wavenumber(omega)))


def radiating_density(integrals: BoundaryIntegrals, trace, coupling: float):
    """Density phi of the combined layer whose exterior trace equals ``trace``."""
    n = len(integrals.D)
    A = 0.5 * np.eye(n) + integrals.D + 1j * coupling * integrals.S
    lu_piv, cond = factorize(A, "exterior layer system")
    return scipy.linalg.lu_solve(lu_piv, trace, check_finite=False), cond


def solve_cfie(Y, LY_s, KY_s, config: CfieConfig, omega: float, e_inc, ht_inc, Y_hat=None):
    """Solve the blended system for the boundary field. Returns (E, diagnostics)."""
    alpha = config.alpha
    eta = config.eta(omega)
    n = len(Y)
    Y_mag = Y
    if config.mfie_uses_background_admittance:
        if Y_hat is None:
            raise ValueError("Y_hat required when mfie_uses_background_admittance is set")
        Y_mag = Y_hat
    A = alpha * (np.eye(n) - LY_s) + (1 - alpha) * eta * (Y_mag - KY_s)
    rhs = alpha * e_inc + (1 - alpha) * eta * ht_inc
    lu_piv, cond = factorize(A, "CFIE system", frequency_hz=omega / (2 * np.pi), alpha=alpha)
    E = scipy.linalg.lu_solve(lu_piv, rhs, check_finite=False)
    residual = float(np.linalg.norm(A @ E - rhs) / np.linalg.norm(rhs))
    return E, {"cond_cfie": cond, "residual_cfie": residual}


def assemble_multi(contours, media, wave: PlaneWave, config: CfieConfig = CfieConfig()) -> BoundarySolution:
    """Solve scattering by several disjoint objects with one global CFIE system.

    ``Y`` and ``Y_s`` are block diagonal (one block per object); ``L`` and ``K``
    couple every pair of segments through the background Green function.
    """
    t0 = time.perf_counter()
    cs = _as_contours(contours)
    ms = tuple(media) if not isinstance(media, Medium) else (media,)
    if len(cs) != len(ms):
        raise ValueError("one medium per contour required")
    for a in range(len(cs)):
        for b in range(a + 1, len(cs)):
            if geometry.contours_overlap(cs[a], cs[b]):
                raise geometry.GeometryError(f"contours {a} and {b} overlap")
    omega = wave.omega
    order = config.quadrature_order
    ops = tuple(differential_admittance(c, m, config.background, omega, order) for c, m in zip(cs, ms))
    offsets = np.cumsum([0] + [c.n_segments for c in cs])
    if len(cs) == 1:
        Y, Y_s, Y_hat = ops[0].Y, ops[0].Y_s, ops[0].Y_hat
        ext = ops[0].exterior
    else:
        Y = scipy.linalg.block_diag(*(o.Y for o in ops))
        Y_s = scipy.linalg.block_diag(*(o.Y_s for o in ops))
        Y_hat = scipy.linalg.block_diag(*(o.Y_hat for o in ops))
        ext = _exterior_integrals(cs, config.background, omega, order)
    L = l_from_integrals(ext, config.background, omega)
    K = k_from_integrals(ext)
    starts = np.concatenate([c.starts for c in cs])
    ends = np.concatenate([c.ends for c in cs])
    LY_s, KY_s, ranks = radiation_products(ops, offsets, L, K, ext, starts, ends,
                                           config.background, omega, config.resonance_threshold)
    e_inc, ht_inc = incident_boundary_fields(cs, wave, config.background)
    E, diag = solve_cfie(Y, LY_s, KY_s, config, omega, e_inc, ht_inc, Y_hat=Y_hat)
    J_s = Y_s @ E
    H_t = Y @ E
    trace = LY_s @ E
    density, diag["cond_layer"] = radiating_density(ext, trace, layer_coupling(config.background, omega))
    diag["resonant_rank"] = ranks
    diag.update({
        "n_segments": int(offsets[-1]),
        "cond_P": [o.diagnostics["cond_P"] for o in ops],
        "cond_P_hat": [o.diagnostics["cond_P_hat"] for o in ops],
        "residual_Y": [o.diagnostics["residual_Y"] for o in ops],
        "residual_Y_hat": [o.diagnostics["residual_Y_hat"] for o in ops],
        "solve_seconds": time.perf_counter() - t0,
    })
    logger.info("CFIE solve f=%.6g Hz N=%d cond=%.3e residual=%.2e",
                wave.frequency, offsets[-1], diag["cond_cfie"], diag["residual_cfie"])
    return BoundarySolution(
        contours=cs, media=ms, config=config, wave=wave, E=E, J_s=J_s, H_t=H_t,
        operators=ops, offsets=offsets, diagnostics=diag, trace=trace, density=density,
    )


def solve(contour: Contour, obj: Medium, wave: PlaneWave, config: CfieConfig = CfieConfig()) -> BoundarySolution:
    """Single-object scattering solve."""
    return assemble_multi([contour], [obj], wave, config)


# ---------------------------------------------------------------------------
# Field reconstruction
# ---------------------------------------------------------------------------
def classify_for_solution(solution: BoundarySolution, points) -> tuple[np.ndarray, np.ndarray]:
    """Region label per point and the index of the containing object (-1 outside)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    region = np.full(len(pts), Region.EXTERIOR.value, dtype="<U13")
    owner = np.full(len(pts), -1)
    for m, c in enumerate(solution.contours):
        labels = geometry.classify_points(c, pts)
        inside = labels == Region.INTERIOR.value
        near = labels == Region.NEAR_BOUNDARY.value
        region[inside] = Region.INTERIOR.value
        owner[inside | near] = m
        region[near] = Region.NEAR_BOUNDARY.value
    return region, owner


def _route(solution: BoundarySolution, method: str | None) -> str:
    if method is None:
        return "layer"
    if method not in ("layer", "current"):
        raise ValueError(f"unknown field method {method!r}; use 'layer' or 'current'")
    return method


def scattered_field(solution: BoundarySolution, points, method: str | None = None) -> np.ndarray:
    """Scattered E_z at off-boundary points (no region check).

    ``method="current"`` radiates the equivalent current, -i omega mu_b int J_s G_b;
    ``method="layer"`` (the default) uses the combined
    layer density that reproduces the same field's boundary trace.
    """
    route = _route(solution, method)
    bg = solution.background
    k0 = bg.wavenumber(solution.omega)
    order = solution.config.quadrature_order
    if route == "current":
        S, _ = potential_matrices(solution.starts, solution.ends, k0, points, derivatives=False, order=order)
        return -1j * solution.omega * bg.mu * (S @ solution.J_s)
    S, D = potential_matrices(solution.starts, solution.ends, k0, points, order=order)
    eta = layer_coupling(bg, solution.omega)
    return D @ solution.density + 1j * eta * (S @ solution.density)


def exterior_field(solution: BoundarySolution, points) -> np.ndarray:
    """Total E_z (incident + scattered) at exterior points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    region, _ = classify_for_solution(solution, pts)
    if np.any(region != Region.EXTERIOR.value):
        raise ValueError("exterior_field accepts exterior points only (outside the near-boundary band)")
    return solution.wave.field(pts, solution.background) + scattered_field(solution, pts)


def interior_field(solution: BoundarySolution, points, obj_index: int | None = None) -> np.ndarray:
    """E_z inside an object from its boundary data via Green's representation.

    E(r) = sum_j [i omega mu int_j G] H_t,j - sum_j [int_j dG/dn'] E_j
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    region, owner = classify_for_solution(solution, pts)
    if np.any(region != Region.INTERIOR.value):
        raise ValueError("interior_field accepts strictly interior points only")
    out = np.empty(len(pts), dtype=complex)
    for m in np.unique(owner) if obj_index is None else [obj_index]:
        sel = owner == m
        c, med = solution.contours[m], solution.media[m]
        sl = solution.object_slice(m)
        k1 = med.wavenumber(solution.omega)
        S, D = potential_matrices(c.starts, c.ends, k1, pts[sel], order=solution.config.quadrature_order)
        out[sel] = 1j * solution.omega * med.mu * (S @ solution.H_t[sl]) - D @ solution.E[sl]
    return out


def boundary_value(solution: BoundarySolution, points) -> np.ndarray:
    """Boundary E of the nearest segment (used for points in the near-boundary band)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.empty(len(pts), dtype=complex)
    best = np.full(len(pts), np.inf)
    for m, c in enumerate(solution.contours):
        dist = geometry.point_segment_distance(c, pts)
        j = np.argmin(dist, axis=1)
        d = dist[np.arange(len(pts)), j]
        better = d < best
        out[better] = solution.E[solution.object_slice(m)][j[better]]
        best = np.minimum(best, d)
    return out


def total_field(solution: BoundarySolution, points) -> FieldGrid:
    """Total E_z at arbitrary points with region tags; near-boundary points are masked.

    Exterior points (and points inside objects made of the background
    medium) use incident plus scattered field; interior points use the
    Green representation of the object's boundary data.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    region, owner = classify_for_solution(solution, pts)
    values = np.empty(len(pts), dtype=complex)
    # an object made of the background medium scatters nothing, so the
    # exterior representation holds inside it as well
    transparent = np.array([m == solution.background for m in solution.media] + [False])
    inside_transparent = (region == Region.INTERIOR.value) & transparent[owner]
    ext = (region == Region.EXTERIOR.value) | inside_transparent
    inn = (region == Region.INTERIOR.value) & ~inside_transparent
    near = region == Region.NEAR_BOUNDARY.value
    if np.any(ext):
        values[ext] = solution.wave.field(pts[ext], solution.background) + scattered_field(solution, pts[ext])
    if np.any(inn):
        values[inn] = interior_field(solution, pts[inn])
    if np.any(near):
        values[near] = boundary_value(solution, pts[near])
    return FieldGrid(points=pts, values=values, region=region)


def grid_points(center=(0.0, 0.0), extent=(4.0, 4.0), spacing: float = 0.04):
    """Regular grid (row-major, y outer) covering ``extent`` around ``center``."""
    nx = int(round(extent[0] / spacing)) + 1
    ny = int(round(extent[1] / spacing)) + 1
    x = center[0] + (np.arange(nx) - (nx - 1) / 2) * spacing
    y = center[1] + (np.arange(ny) - (ny - 1) / 2) * spacing
    xx, yy = np.meshgrid(x, y)
    return np.column_stack([xx.ravel(), yy.ravel()]), (ny, nx)


def field_grid(solution: BoundarySolution, center=(0.0, 0.0), extent=(4.0, 4.0), spacing=0.04) -> FieldGrid:
    pts, shape = grid_points(center, extent, spacing)
    g = total_field(solution, pts)
    return FieldGrid(points=g.points, values=g.values, region=g.region, shape=shape)


# ---------------------------------------------------------------------------
# Far field and scattering width
# ---------------------------------------------------------------------------
_FAR_ORDER = 8


def far_field(solution: BoundarySolution, angles, method: str | None = None) -> np.ndarray:
    """Pattern F(phi) with E^s(rho, phi) ~ F(phi) exp(-i k0 rho) / sqrt(rho).

    With G ~ c(rho) exp(i k0 phi_hat . r'), c = -(i/4) sqrt(2 / (pi k0 rho)) exp(i pi/4 - i k0 rho),
    the current route gives -i omega mu_b sum_j J_j int_j exp(i k0 phi_hat . r') dl' and
    the layer route sum_j phi_j int_j (i k0 phi_hat . n_j + i eta) exp(i k0 phi_hat . r') dl'
    (times the rho-independent part of c).
    """
    route = _route(solution, method)
    phi = np.atleast_1d(np.asarray(angles, dtype=float))
    bg = solution.background
    omega = solution.omega
    k0 = bg.wavenumber(omega)
    starts, ends = solution.starts, solution.ends
    t, w = np.polynomial.legendre.leggauss(_FAR_ORDER)
    t, w = 0.5 * (t + 1), 0.5 * w
    edge = ends - starts
    lengths = np.hypot(edge[:, 0], edge[:, 1])
    nodes = starts[:, None, :] + t[None, :, None] * edge[:, None, :]
    dirs = np.column_stack([np.cos(phi), np.sin(phi)])
    phase = np.exp(1j * k0 * np.einsum("ac,nqc->anq", dirs, nodes)) * (lengths[:, None] * w[None, :])
    integrals = phase.sum(axis=2)  # (angles, segments)
    pref = -0.25j * np.sqrt(2 / (np.pi * k0)) * np.exp(0.25j * np.pi)
    if route == "current":
        return pref * (-1j * omega * bg.mu) * (integrals @ solution.J_s)
    normals = np.column_stack([edge[:, 1], -edge[:, 0]]) / lengths[:, None]
    eta = layer_coupling(bg, omega)
    factor = 1j * k0 * (dirs @ normals.T) + 1j * eta
    return pref * ((factor * integrals) @ solution.density)


def scattering_width(F, amplitude, angles=None) -> RcsCurve:
    """2D scattering width sigma = 2 pi |F|^2 / |E0|^2 (metres)."""
    F = np.asarray(F)
    if not abs(amplitude) > 0:
        raise ValueError("incident amplitude must be nonzero")
    sigma = 2 * np.pi * np.abs(F) ** 2 / abs(amplitude) ** 2
    if angles is None:
        angles = np.linspace(0, 2 * np.pi, len(sigma), endpoint=False)
    return RcsCurve(angles=np.asarray(angles, dtype=float), sigma=sigma)


def scattering_cross_width(solution: BoundarySolution, n_angles: int = 720) -> float:
    """Total scattering width (1/2pi) int sigma dphi, by the periodic trapezoid rule."""
    phi = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    sigma = scattering_width(far_field(solution, phi), solution.wave.amplitude).sigma
    return float(np.mean(sigma))


def extinction_width(solution: BoundarySolution) -> float:
    """Extinction width from the forward amplitude (optical theorem)."""
    k0 = solution.background.wavenumber(solution.omega).real
    F_fwd = far_field(solution, [solution.wave.angle])[0]
    return float(-np.sqrt(8 * np.pi / k0) * np.real(F_fwd * np.exp(-0.25j * np.pi) / solution.wave.amplitude))


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------
def error_metrics(reference, computed, mask=None) -> dict:
    """Max pointwise error normalised by max |reference|, and the RMS ratio."""
    ref = np.asarray(reference)
    cal = np.asarray(computed)
    if ref.shape != cal.shape:
        raise ValueError("reference and computed fields differ in length")
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        ref, cal = ref[m], cal[m]
    diff = np.abs(ref - cal)
    scale = np.max(np.abs(ref))
    max_rel = float(np.max(diff) / scale) if scale > 0 else float(np.max(diff))
    den = np.sum(np.abs(ref) ** 2)
    rms = float(np.sqrt(np.sum(diff**2) / den)) if den > 0 else float(np.sqrt(np.sum(diff**2)))
    return {"max_rel": max_rel, "rms": rms}


def curve_error(reference, computed) -> float:
    """Relative L2 error between two sampled curves."""
    ref = np.asarray(reference, dtype=float)
    cal = np.asarray(computed, dtype=float)
    scale = np.linalg.norm(ref)
    diff = np.linalg.norm(cal - ref)
    return float(diff / scale) if scale > 0 else float(diff)
