"""Signed crossings, linking numbers and directional writhe of polygons.

Crossing convention: for oriented segments ``a`` and ``b`` whose projections
(orthogonal to a unit direction ``d``) cross, the sign is

    sign(det2(a', b')) * sign(h_a - h_b)

where ``det2`` is the orientation determinant of the projected directions in
a right-handed frame ``(e1, e2, d)`` and ``h`` is the height along ``d`` at the
crossing.  Equivalently ``sign((da x db) . d) * sign((pa - pb) . d)``; it is
symmetric in ``a`` and ``b`` and flips when either segment is reversed.

Configurations within ``TOL`` of a degeneracy raise instead of guessing.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import DegenerateIntersection, DegenerateProjection, OddCrossingSum

TOL = 1e-12
DEGENERATE = 2

Z_AXIS = np.array([0.0, 0.0, 1.0])


class Segment(NamedTuple):
    tail: np.ndarray
    head: np.ndarray

    def reversed(self) -> "Segment":
        return Segment(self.head, self.tail)


# --- compiled kernels -------------------------------------------------------


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True)
def crossing_z(px, py, pz, qx, qy, qz, rx, ry, rz, sx, sy, sz, tol):
    """Signed crossing of p->q with r->s viewed from +z, or DEGENERATE."""
    if (max(px, qx) < min(rx, sx) - tol or max(rx, sx) < min(px, qx) - tol
            or max(py, qy) < min(ry, sy) - tol or max(ry, sy) < min(py, qy) - tol):
        return 0
    d1 = _orient(rx, ry, sx, sy, px, py)
    d2 = _orient(rx, ry, sx, sy, qx, qy)
    if abs(d1) < tol or abs(d2) < tol:
        return DEGENERATE
    if (d1 > 0.0) == (d2 > 0.0):
        return 0
    d3 = _orient(px, py, qx, qy, rx, ry)
    d4 = _orient(px, py, qx, qy, sx, sy)
    if abs(d3) < tol or abs(d4) < tol:
        return DEGENERATE
    if (d3 > 0.0) == (d4 > 0.0):
        return 0
    t = d1 / (d1 - d2)
    u = d3 / (d3 - d4)
    dh = (pz + t * (qz - pz)) - (rz + u * (sz - rz))
    if abs(dh) < tol:
        return DEGENERATE
    det = (qx - px) * (sy - ry) - (qy - py) * (sx - rx)
    sign = 1 if det > 0.0 else -1
    return sign if dh > 0.0 else -sign


@njit(cache=True)
def crossing_rows(P, i, j, k, m, tol):
    """crossing_z for segments P[i]->P[j] and P[k]->P[m] of a point array."""
    return crossing_z(P[i, 0], P[i, 1], P[i, 2], P[j, 0], P[j, 1], P[j, 2],
                      P[k, 0], P[k, 1], P[k, 2], P[m, 0], P[m, 1], P[m, 2], tol)


@njit(cache=True)
def frame(d):
    """Orthonormal (e1, e2) with e1 x e2 = d for a unit vector d."""
    if abs(d[0]) < 0.9:
        a0, a1, a2 = 1.0, 0.0, 0.0
    else:
        a0, a1, a2 = 0.0, 1.0, 0.0
    dot = a0 * d[0] + a1 * d[1] + a2 * d[2]
    e1 = np.array([a0 - dot * d[0], a1 - dot * d[1], a2 - dot * d[2]])
    e1 /= math.sqrt(e1[0] ** 2 + e1[1] ** 2 + e1[2] ** 2)
    e2 = np.array([d[1] * e1[2] - d[2] * e1[1],
                   d[2] * e1[0] - d[0] * e1[2],
                   d[0] * e1[1] - d[1] * e1[0]])
    return e1, e2


@njit(cache=True)
def project(points, d):
    """Coordinates (p.e1, p.e2, p.d): viewing along d becomes viewing from +z."""
    e1, e2 = frame(d)
    out = np.empty_like(points)
    for i in range(points.shape[0]):
        x, y, z = points[i, 0], points[i, 1], points[i, 2]
        out[i, 0] = x * e1[0] + y * e1[1] + z * e1[2]
        out[i, 1] = x * e2[0] + y * e2[1] + z * e2[2]
        out[i, 2] = x * d[0] + y * d[1] + z * d[2]
    return out


@njit(cache=True)
def direction_from_uniforms(u1, u2):
    z = 2.0 * u1 - 1.0
    phi = 2.0 * math.pi * u2
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return np.array([r * math.cos(phi), r * math.sin(phi), z])


@njit(cache=True)
def _link_sum(A, B, tol):
    """Raw signed-crossing sum of two projected polygons; (-1,-1) if clean."""
    k = A.shape[0]
    l = B.shape[0]
    total = 0
    for i in range(k):
        i2 = (i + 1) % k
        for j in range(l):
            j2 = (j + 1) % l
            c = crossing_z(A[i, 0], A[i, 1], A[i, 2], A[i2, 0], A[i2, 1], A[i2, 2],
                           B[j, 0], B[j, 1], B[j, 2], B[j2, 0], B[j2, 1], B[j2, 2], tol)
            if c == DEGENERATE:
                return total, i, j
            total += c
    return total, -1, -1


@njit(cache=True)
def _writhe_sum(A, tol):
    k = A.shape[0]
    total = 0
    for i in range(k):
        i2 = (i + 1) % k
        for j in range(i + 2, k):
            if i == 0 and j == k - 1:
                continue
            j2 = (j + 1) % k
            c = crossing_z(A[i, 0], A[i, 1], A[i, 2], A[i2, 0], A[i2, 1], A[i2, 2],
                           A[j, 0], A[j, 1], A[j, 2], A[j2, 0], A[j2, 1], A[j2, 2], tol)
            if c == DEGENERATE:
                return total, i, j
            total += c
    return total, -1, -1


# --- public API -------------------------------------------------------------


def as_direction(d) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    norm = float(np.linalg.norm(d))
    if d.shape != (3,) or not math.isfinite(norm) or norm == 0.0:
        raise ValueError(f"not a direction: {d!r}")
    if abs(norm - 1.0) > 1e-12:
        d = d / norm
    return d


def _polygon(points) -> np.ndarray:
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 3:
        raise ValueError("a polygon needs at least three 3D vertices")
    if not np.all(np.isfinite(arr)):
        raise ValueError("polygon coordinates must be finite")
    return arr


def signed_crossing(a: Segment, b: Segment, direction=Z_AXIS) -> int:
    """Signed crossing of two segments projected orthogonally to ``direction``."""
    a0, a1 = np.asarray(a[0], float), np.asarray(a[1], float)
    b0, b1 = np.asarray(b[0], float), np.asarray(b[1], float)
    for p in (a0, a1):
        for r in (b0, b1):
            if np.array_equal(p, r):
                raise ValueError("segments share an endpoint")
    P = project(np.stack([a0, a1, b0, b1]), as_direction(direction))
    c = crossing_rows(P, 0, 1, 2, 3, TOL)
    if c == DEGENERATE:
        raise DegenerateProjection("segments are in a degenerate position", pair=(0, 0))
    return int(c)


def crossing_sum(A, B, direction=Z_AXIS) -> int:
    """Sum of signed crossings over all edge pairs of two polygons (twice lk)."""
    d = as_direction(direction)
    total, i, j = _link_sum(project(_polygon(A), d), project(_polygon(B), d), TOL)
    if i >= 0:
        raise DegenerateProjection(f"edges {i} and {j} are in a degenerate position",
                                   pair=(int(i), int(j)))
    return int(total)


def linking_number(A, B, direction=Z_AXIS) -> int:
    """Linking number of two disjoint closed polygons, from one projection."""
    total = crossing_sum(A, B, direction)
    if total % 2:
        raise OddCrossingSum(f"signed crossing sum {total} is odd")
    return total // 2


def directional_writhe(A, direction=Z_AXIS) -> int:
    """Sum of signed self-crossings of a closed polygon projected along ``direction``."""
    total, i, j = _writhe_sum(project(_polygon(A), as_direction(direction)), TOL)
    if i >= 0:
        raise DegenerateProjection(f"edges {i} and {j} are in a degenerate position",
                                   pair=(int(i), int(j)))
    return int(total)


def sample_direction(rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the sphere: uniform height in [-1, 1], uniform angle."""
    return direction_from_uniforms(rng.random(), rng.random())


# --- independent oracle -----------------------------------------------------


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _cross(p, q):
    return (p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0])


def _dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _barycentric(x, tri, normal, nn):
    t0, t1, t2 = tri
    return (_dot(normal, _cross(_sub(t1, x), _sub(t2, x))) / nn,
            _dot(normal, _cross(_sub(t2, x), _sub(t0, x))) / nn,
            _dot(normal, _cross(_sub(t0, x), _sub(t1, x))) / nn)


def _segment_through_triangle(p, q, tri, tol) -> int:
    t0 = tri[0]
    normal = _cross(_sub(tri[1], t0), _sub(tri[2], t0))
    nn = _dot(normal, normal)
    if nn == 0.0:
        raise DegenerateIntersection("fan triangle has zero area")
    scale = math.sqrt(nn)
    dp = _dot(normal, _sub(p, t0)) / scale
    dq = _dot(normal, _sub(q, t0)) / scale
    if (dp > tol and dq > tol) or (dp < -tol and dq < -tol):
        return 0
    if abs(dp) <= tol or abs(dq) <= tol:
        # an endpoint touches the plane: harmless unless it touches the triangle
        for x, dx in ((p, dp), (q, dq)):
            if abs(dx) <= tol and min(_barycentric(x, tri, normal, nn)) > -tol:
                raise DegenerateIntersection("segment touches a spanning triangle")
        return 0
    t = dp / (dp - dq)
    x = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2]))
    bary = _barycentric(x, tri, normal, nn)
    if min(bary) < -tol:
        return 0
    if min(bary) <= tol:
        raise DegenerateIntersection("segment passes through a triangle boundary")
    return 1 if dq > dp else -1


def linking_number_oracle(A, B, tol: float = TOL) -> int:
    """Linking number as the algebraic intersection of B with a fan surface on A.

    A is coned from its first vertex into triangles (v0, vi, vi+1), each
    oriented so that the fan's boundary is A; every edge of B contributes +1
    or -1 for each triangle it pierces, according to the side it exits on.
    Plain floating point, no projection: an independent cross-check of
    :func:`linking_number`.
    """
    A = [tuple(map(float, v)) for v in _polygon(A)]
    B = [tuple(map(float, v)) for v in _polygon(B)]
    total = 0
    for i in range(1, len(A) - 1):
        tri = (A[0], A[i], A[i + 1])
        for j in range(len(B)):
            total += _segment_through_triangle(B[j], B[(j + 1) % len(B)], tri, tol)
    return total
