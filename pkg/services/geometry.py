"""Convex polygon helpers and the exact plane-wave integral over a triangle"""
import logging
import math
from typing import List, Tuple

import numpy as np

from errors import GeometryError

logger = logging.getLogger(__name__)

DEGENERATE_AREA = 1e-12
# below this spread a divided difference is evaluated from its Taylor expansion
TAYLOR_SPREAD = 1e-3


def as_convex_polygon(vertices) -> np.ndarray:
    """Validate a strictly convex counter-clockwise vertex list, returned as (m, 2) floats"""
    poly = np.asarray(vertices, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2:
        raise GeometryError(f"Vertices must be a list of 2D points, got shape {poly.shape}")
    if poly.shape[0] < 3:
        raise GeometryError(f"Polygon needs at least 3 vertices, got {poly.shape[0]}")
    if not np.all(np.isfinite(poly)):
        raise GeometryError("Vertex coordinates must be finite")

    edges = np.roll(poly, -1, axis=0) - poly
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    scale = float(lengths.max())
    if np.any(lengths <= 1e-12 * max(scale, 1.0)):
        raise GeometryError("Polygon has repeated consecutive vertices")
    for i in range(len(poly)):
        for j in range(i + 1, len(poly)):
            if np.allclose(poly[i], poly[j], rtol=0.0, atol=1e-12 * scale):
                raise GeometryError(f"Vertices {i} and {j} coincide")

    turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    if np.any(turns <= 1e-12 * scale * scale):
        if np.all(turns < 0):
            raise GeometryError("Polygon vertices must be counter-clockwise")
        raise GeometryError("Polygon must be strictly convex")
    # a star polygon turns left at every vertex but winds more than once
    winding = np.sum(np.arctan2(turns, np.einsum("ij,ij->i", edges, np.roll(edges, -1, axis=0))))
    if winding > 2.0 * np.pi + 1e-6:
        raise GeometryError("Polygon must be simple (it winds more than once)")
    return poly


def polygon_area(vertices) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(vertices) -> np.ndarray:
    x, y = vertices[:, 0], vertices[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    area = 0.5 * np.sum(cross)
    cx = np.sum((x + np.roll(x, -1)) * cross) / (6.0 * area)
    cy = np.sum((y + np.roll(y, -1)) * cross) / (6.0 * area)
    return np.array([cx, cy])


def polygon_perimeter(vertices) -> float:
    edges = np.roll(vertices, -1, axis=0) - vertices
    return float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))


def fan_triangles(vertices) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Triangles (v0, v_i, v_{i+1}) of a fan from the first vertex"""
    return [(vertices[0], vertices[i], vertices[i + 1]) for i in range(1, len(vertices) - 1)]


def polygon_contains(vertices, points, tol: float = 1e-12) -> np.ndarray:
    """True for points inside or on the boundary of a convex counter-clockwise polygon"""
    pts = np.asarray(points, dtype=float)
    inside = np.ones(pts.shape[:-1], dtype=bool)
    nxt = np.roll(vertices, -1, axis=0)
    for a, b in zip(vertices, nxt):
        edge = b - a
        cross = edge[0] * (pts[..., 1] - a[1]) - edge[1] * (pts[..., 0] - a[0])
        inside &= cross >= -tol * np.hypot(edge[0], edge[1])
    return inside


def _derivative(order: int, x: np.ndarray) -> np.ndarray:
    """d^order/dx^order of exp(-ix)"""
    return (-1j) ** order * np.exp(-1j * x)


def _first_difference(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    gap = y - x
    close = np.abs(gap) < TAYLOR_SPREAD
    mid = 0.5 * (x + y)
    taylor = _derivative(1, mid) + _derivative(3, mid) * gap * gap / 24.0
    safe = np.where(close, 1.0, gap)
    exact = (np.exp(-1j * y) - np.exp(-1j * x)) / safe
    return np.where(close, taylor, exact)


def _complete_homogeneous(d0, d1, d2, degree: int):
    total = np.zeros_like(d0)
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            total = total + d0 ** i * d1 ** j * d2 ** (degree - i - j)
    return total


def second_divided_difference(a, b, c) -> np.ndarray:
    """exp(-ix)[a, b, c] for real arrays, stable for nearly equal nodes"""
    nodes = np.sort(np.stack(np.broadcast_arrays(a, b, c)).astype(float), axis=0)
    x0, x1, x2 = nodes
    spread = x2 - x0

    mean = (x0 + x1 + x2) / 3.0
    d0, d1, d2 = x0 - mean, x1 - mean, x2 - mean
    taylor = _derivative(2, mean) / 2.0
    for degree in (2, 3, 4):
        taylor = taylor + _derivative(degree + 2, mean) / math.factorial(degree + 2) * _complete_homogeneous(
            d0, d1, d2, degree
        )

    safe = np.where(spread < TAYLOR_SPREAD, 1.0, spread)
    split = (_first_difference(x1, x2) - _first_difference(x0, x1)) / safe
    return np.where(spread < TAYLOR_SPREAD, taylor, split)


def triangle_exp_integral(v1, v2, v3, q) -> np.ndarray:
    """Integral of exp(-i q.z) over the triangle (v1, v2, v3).

    q may be a single wave vector or an array of shape (..., 2); the integral equals
    -2|T| times the second divided difference of exp(-ix) at the nodes q.v_i.
    """
    v1, v2, v3 = (np.asarray(v, dtype=float) for v in (v1, v2, v3))
    e1, e2 = v2 - v1, v3 - v1
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    if area <= DEGENERATE_AREA:
        raise GeometryError(f"Degenerate triangle (area {area:.3e})")
    q = np.asarray(q, dtype=float)
    a = q @ v1
    b = q @ v2
    c = q @ v3
    out = -2.0 * area * second_divided_difference(a, b, c)
    return out if out.ndim else complex(out)
