"""Closed-contour discretisation into flat pulse-basis segments.

Segments are traversed counterclockwise with the outward normal obtained by
rotating the tangent by -90 degrees, so that ``tangent = z_hat x normal``.
Collocation happens at segment midpoints; polygon vertices are always
segment endpoints, so no collocation point sits on a corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

NEAR_BOUNDARY_FACTOR = 0.25


class GeometryError(ValueError):
    """Invalid contour input (degenerate, self-intersecting, bad sizes)."""


class Region(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    NEAR_BOUNDARY = "near-boundary"


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.start + self.end)

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.end - self.start)))

    @property
    def tangent(self) -> np.ndarray:
        return (self.end - self.start) / self.length

    @property
    def normal(self) -> np.ndarray:
        t = self.tangent
        return np.array([t[1], -t[0]])


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed counterclockwise polygonal contour.

    Attributes
    ----------
    nodes : np.ndarray, shape (N, 2)
        Segment start points; segment ``i`` runs from ``nodes[i]`` to
        ``nodes[(i + 1) % N]``.
    """

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or len(nodes) < 3:
            raise GeometryError("a contour needs at least 3 nodes of shape (N, 2)")
        if np.any(self.lengths <= 0):
            raise GeometryError("zero-length segment in contour")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_segments(self) -> int:
        return len(self.nodes)

    @cached_property
    def starts(self) -> np.ndarray:
        return self.nodes

    @cached_property
    def ends(self) -> np.ndarray:
        return np.roll(self.nodes, -1, axis=0)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.starts + self.ends)

    @cached_property
    def lengths(self) -> np.ndarray:
        d = self.ends - self.starts
        return np.hypot(d[:, 0], d[:, 1])

    @cached_property
    def tangents(self) -> np.ndarray:
        return (self.ends - self.starts) / self.lengths[:, None]

    @cached_property
    def normals(self) -> np.ndarray:
        t = self.tangents
        return np.column_stack([t[:, 1], -t[:, 0]])

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.lengths))

    @property
    def signed_area(self) -> float:
        x, y = self.starts[:, 0], self.starts[:, 1]
        xe, ye = self.ends[:, 0], self.ends[:, 1]
        return 0.5 * float(np.sum(x * ye - xe * y))

    @property
    def segments(self) -> list[Segment]:
        return [Segment(s, e) for s, e in zip(self.starts, self.ends)]

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        lo = self.nodes.min(axis=0)
        hi = self.nodes.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def classify(self, points) -> np.ndarray:
        """Vectorised :func:`classify_point`; returns an array of :class:`Region` value strings."""
        return classify_points(self, points)


def _equal_split(a: np.ndarray, b: np.ndarray, max_seg_len: float) -> np.ndarray:
    """Start points of ceil(|b - a| / max_seg_len) equal pieces of edge a->b."""
    length = float(np.hypot(*(b - a)))
    n = max(1, math.ceil(length / max_seg_len - 1e-12))
    t = np.arange(n)[:, None] / n
    return a[None, :] + t * (b - a)[None, :]


def discretize_circle(center, radius: float, max_seg_len: float) -> Contour:
    """Inscribed regular polygon with ceil(2 pi r / max_seg_len) equal chords."""
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    if not 0 < max_seg_len < 2 * math.pi * radius:
        raise GeometryError(f"max_seg_len must lie in (0, 2*pi*radius), got {max_seg_len}")
    n = math.ceil(2 * math.pi * radius / max_seg_len - 1e-12)
    n = max(n, 3)
    theta = 2 * math.pi * np.arange(n) / n
    c = np.asarray(center, dtype=float)
    nodes = c + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return Contour(nodes)


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 and d2 and d3 and d4:
        return True

    def on_segment(a, b, c):
        return min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14 and min(
            a[1], b[1]
        ) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14

    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if d == 0 and on_segment(a, b, c):
            return True
    return False


def check_simple_polygon(vertices: np.ndarray) -> None:
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if np.allclose(a, b):
            raise GeometryError(f"repeated vertex at index {i}")
        for j in range(i + 1, n):
            # skip edges sharing a vertex
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = vertices[j], vertices[(j + 1) % n]
            if _segments_intersect(a, b, c, d):
                raise GeometryError(f"polygon edges {i} and {j} intersect")


def discretize_polygon(vertices, max_seg_len: float) -> Contour:
    """Split every polygon edge into ceil(edge / max_seg_len) equal segments.

    The vertex order is normalised to counterclockwise.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise GeometryError("polygon needs at least 3 (x, y) vertices")
    if not max_seg_len > 0:
        raise GeometryError(f"max_seg_len must be positive, got {max_seg_len}")
    check_simple_polygon(v)
    x, y = v[:, 0], v[:, 1]
    area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if abs(area) < 1e-14:
        raise GeometryError("degenerate polygon (zero area)")
    if area < 0:
        v = v[::-1]
    # canonical start (lowest x, then lowest y) so any input ordering of the
    # same polygon yields the same contour
    first = min(range(len(v)), key=lambda i: (v[i, 0], v[i, 1]))
    v = np.roll(v, -first, axis=0)
    pieces = [_equal_split(v[i], v[(i + 1) % len(v)], max_seg_len) for i in range(len(v))]
    return Contour(np.concatenate(pieces))


def rectangle_vertices(center, width: float, height: float) -> np.ndarray:
    cx, cy = center
    hw, hh = 0.5 * width, 0.5 * height
    return np.array([[cx - hw, cy - hh], [cx + hw, cy - hh], [cx + hw, cy + hh], [cx - hw, cy + hh]])


def point_segment_distance(contour: Contour, points: np.ndarray) -> np.ndarray:
    """Distance from each point (M, 2) to each segment, shape (M, N)."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    a = contour.starts[None, :, :]
    d = (contour.ends - contour.starts)[None, :, :]
    rel = p[:, None, :] - a
    t = np.clip(np.sum(rel * d, axis=-1) / np.sum(d * d, axis=-1), 0.0, 1.0)
    closest = a + t[..., None] * d
    return np.hypot(*(p[:, None, :] - closest).transpose(2, 0, 1))


def winding_inside(contour: Contour, points: np.ndarray) -> np.ndarray:
    """Even-odd ray-crossing test against the discretised polygon."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = p[:, 0:1], p[:, 1:2]
    x0, y0 = contour.starts[:, 0][None, :], contour.starts[:, 1][None, :]
    x1, y1 = contour.ends[:, 0][None, :], contour.ends[:, 1][None, :]
    straddles = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    crossings = straddles & (x < x_cross)
    return (np.count_nonzero(crossings, axis=1) % 2) == 1


def classify_points(contour: Contour, points) -> np.ndarray:
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    dist = point_segment_distance(contour, p)
    near = np.any(dist < NEAR_BOUNDARY_FACTOR * contour.lengths[None, :], axis=1)
    inside = winding_inside(contour, p)
    out = np.where(inside, Region.INTERIOR.value, Region.EXTERIOR.value).astype("<U13")
    out[near] = Region.NEAR_BOUNDARY.value
    return out


def classify_point(contour: Contour, point) -> Region:
    """Interior / exterior / near-boundary classification of a single point."""
    return Region(classify_points(contour, np.asarray(point, dtype=float)[None, :])[0])


def contours_overlap(a: Contour, b: Contour) -> bool:
    """True when two contours intersect or one contains the other."""
    ax0, ay0, ax1, ay1 = a.bounding_box
    bx0, by0, bx1, by1 = b.bounding_box
    if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
        return False
    if np.any(winding_inside(a, b.nodes)) or np.any(winding_inside(b, a.nodes)):
        return True
    for i in range(a.n_segments):
        for j in range(b.n_segments):
            if _segments_intersect(a.starts[i], a.ends[i], b.starts[j], b.ends[j]):
                return True
    return False
