"""Contour discretisation and point classification."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssie2d.geometry import (
    Contour,
    GeometryError,
    Region,
    classify_point,
    classify_points,
    contours_overlap,
    discretize_circle,
    discretize_polygon,
    rectangle_vertices,
)

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def assert_valid_contour(c: Contour):
    # closure: each end is the next start, the last connects to the first
    assert np.array_equal(c.ends[:-1], c.starts[1:])
    assert np.array_equal(c.ends[-1], c.starts[0])
    assert c.signed_area > 0
    assert np.all(c.lengths > 0)
    assert np.allclose(np.hypot(*c.normals.T), 1.0, atol=1e-14)
    assert np.allclose(np.hypot(*c.tangents.T), 1.0, atol=1e-14)
    assert np.allclose(np.sum(c.normals * c.tangents, axis=1), 0.0, atol=1e-14)
    # tangent = z x normal
    assert np.allclose(c.tangents, np.column_stack([-c.normals[:, 1], c.normals[:, 0]]), atol=1e-14)
    assert c.perimeter == pytest.approx(float(np.sum(c.lengths)), rel=1e-15)
    assert np.allclose(c.midpoints, 0.5 * (c.starts + c.ends))


def test_circle_segment_count():
    assert discretize_circle((0, 0), 1.0, 0.1).n_segments == 63


def test_circle_area_matches_regular_polygon():
    c = discretize_circle((0, 0), 1.0, 0.1)
    n = c.n_segments
    assert c.signed_area == pytest.approx(0.5 * n * math.sin(2 * math.pi / n), rel=1e-13)
    assert c.signed_area == pytest.approx(3.1364, abs=1e-4)
    fine = discretize_circle((0, 0), 1.0, 0.001)
    assert abs(fine.signed_area - math.pi) < abs(c.signed_area - math.pi) < 0.01


def test_circle_normals_point_outward():
    c = discretize_circle((0.3, -0.2), 1.0, 0.1)
    assert np.all(np.sum(c.normals * (c.midpoints - [0.3, -0.2]), axis=1) > 0)
    assert_valid_contour(c)


def test_square_counts_and_perimeter():
    c = discretize_polygon(UNIT_SQUARE, 0.05)
    assert c.n_segments == 80
    assert abs(c.perimeter - 4.0) <= 1e-12
    assert_valid_contour(c)


def test_polygon_vertices_are_segment_endpoints():
    c = discretize_polygon(UNIT_SQUARE, 0.3)
    for v in UNIT_SQUARE:
        assert np.any(np.all(np.isclose(c.starts, v, atol=1e-15), axis=1))
        # no collocation point on a corner
        assert np.min(np.hypot(*(c.midpoints - v).T)) > 0.1


def test_clockwise_input_gives_identical_contour():
    ccw = discretize_polygon(UNIT_SQUARE, 0.05)
    cw = discretize_polygon(UNIT_SQUARE[::-1], 0.05)
    assert np.array_equal(ccw.nodes, cw.nodes)


def test_rotated_vertex_order_gives_identical_contour():
    ccw = discretize_polygon(UNIT_SQUARE, 0.05)
    rolled = discretize_polygon(UNIT_SQUARE[2:] + UNIT_SQUARE[:2], 0.05)
    assert np.array_equal(ccw.nodes, rolled.nodes)


def test_rectangle_vertices():
    v = rectangle_vertices((1.0, 2.0), 2.0, 1.0)
    c = discretize_polygon(v, 0.1)
    assert c.signed_area == pytest.approx(2.0, rel=1e-14)
    assert c.bounding_box == pytest.approx((0.0, 1.5, 2.0, 2.5))


@pytest.mark.parametrize("radius,seg", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0), (1.0, -0.1), (1.0, 7.0)])
def test_circle_rejects_bad_arguments(radius, seg):
    with pytest.raises(GeometryError):
        discretize_circle((0, 0), radius, seg)


def test_polygon_rejects_self_intersection():
    bowtie = [(0, 0), (1, 1), (1, 0), (0, 1)]
    with pytest.raises(GeometryError):
        discretize_polygon(bowtie, 0.1)


@pytest.mark.parametrize("verts", [[(0, 0), (1, 0)], [(0, 0), (1, 0), (2, 0)], [(0, 0), (0, 0), (1, 1)]])
def test_polygon_rejects_degenerate(verts):
    with pytest.raises(GeometryError):
        discretize_polygon(verts, 0.1)


def test_classification_examples():
    c = discretize_circle((0, 0), 1.0, 0.1)
    assert classify_point(c, (0, 0)) is Region.INTERIOR
    assert classify_point(c, (5, 0)) is Region.EXTERIOR
    p = c.midpoints[10] + 0.01 * c.lengths[10] * c.normals[10]
    assert classify_point(c, p) is Region.NEAR_BOUNDARY
    q = c.midpoints[10] - 0.01 * c.lengths[10] * c.normals[10]
    assert classify_point(c, q) is Region.NEAR_BOUNDARY


def test_classification_agrees_with_disk_away_from_boundary():
    c = discretize_circle((0, 0), 1.0, 0.1)
    xs = np.linspace(-2, 2, 81)
    pts = np.array([(x, y) for y in xs for x in xs])
    labels = classify_points(c, pts)
    r = np.hypot(*pts.T)
    far = np.abs(r - 1.0) > c.lengths.max()
    assert np.all((labels[far] == Region.INTERIOR.value) == (r[far] < 1.0))
    assert np.all(labels[far] != Region.NEAR_BOUNDARY.value)


def test_overlap_detection():
    a = discretize_circle((0, 0), 1.0, 0.1)
    assert contours_overlap(a, discretize_circle((1.5, 0), 1.0, 0.1))
    assert contours_overlap(a, discretize_circle((0, 0), 0.3, 0.1))  # containment
    assert not contours_overlap(a, discretize_circle((3, 0), 1.0, 0.1))


def test_contour_is_immutable():
    c = discretize_circle((0, 0), 1.0, 0.5)
    with pytest.raises(ValueError):
        c.nodes[0, 0] = 3.0


@given(
    n=st.integers(3, 9),
    radii=st.lists(st.floats(0.5, 2.0), min_size=9, max_size=9),
    seg=st.floats(0.05, 0.5),
    reverse=st.booleans(),
)
def test_star_polygons_are_valid(n, radii, seg, reverse):
    theta = 2 * np.pi * np.arange(n) / n
    r = np.asarray(radii[:n])
    verts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    if reverse:
        verts = verts[::-1]
    c = discretize_polygon(verts, seg)
    assert_valid_contour(c)
    assert np.all(c.lengths <= seg * (1 + 1e-12))
    edges = np.hypot(*(np.roll(verts, -1, axis=0) - verts).T)
    assert c.perimeter == pytest.approx(float(edges.sum()), rel=1e-12)
    assert c.n_segments == sum(math.ceil(e / seg - 1e-12) for e in edges)
    assert classify_point(c, (0.0, 0.0)) is Region.INTERIOR


@given(radius=st.floats(0.1, 5.0), seg_frac=st.floats(0.01, 0.5), cx=st.floats(-3, 3), cy=st.floats(-3, 3))
def test_circles_are_valid(radius, seg_frac, cx, cy):
    seg = seg_frac * radius
    c = discretize_circle((cx, cy), radius, seg)
    assert_valid_contour(c)
    assert c.n_segments == max(3, math.ceil(2 * math.pi * radius / seg - 1e-12))
    assert np.allclose(np.hypot(*(c.nodes - [cx, cy]).T), radius)
