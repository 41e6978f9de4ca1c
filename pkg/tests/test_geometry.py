import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CROSSING_SQUARE, FAR_A, FAR_B, HOPF_A, HOPF_B
from oracles import crossing_sign_exact, linking_number_exact, writhe_exact
from randlink.errors import DegenerateProjection
from randlink.geometry import (Segment, Z_AXIS, crossing_sum, directional_writhe, frame,
                               linking_number, linking_number_oracle, project,
                               sample_direction, signed_crossing)

GENERIC = np.array([0.3, 0.2, 0.9]) / np.linalg.norm([0.3, 0.2, 0.9])

coord = st.floats(0.0, 1.0, allow_nan=False)
point = st.tuples(coord, coord, coord)


def random_polygon(rng, k):
    return rng.random((k, 3))


def rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


# --- signed crossings -------------------------------------------------------


def test_disjoint_projections_give_zero():
    a = Segment((0, 0, 0), (1, 0, 0))
    b = Segment((0, 2, 1), (1, 3, 1))
    assert signed_crossing(a, b) == 0


def test_hand_evaluated_crossing():
    a = Segment((0, 0, 0), (1, 1, 0))
    b = Segment((1, 0, 1), (0, 1, 1))
    value = signed_crossing(a, b)
    assert abs(value) == 1
    # b is over a; the planar turn from a to b is counterclockwise
    assert value == -1
    assert signed_crossing(b, a) == value


def test_reversal_flips_sign():
    a = Segment((0, 0, 0), (1, 1, 0))
    b = Segment((1, 0, 1), (0, 1, 1))
    assert signed_crossing(a.reversed(), b) == -signed_crossing(a, b)
    assert signed_crossing(a, b.reversed()) == -signed_crossing(a, b)


def test_shared_endpoint_rejected():
    with pytest.raises(ValueError):
        signed_crossing(Segment((0, 0, 0), (1, 1, 0)), Segment((1, 1, 0), (0, 1, 1)))


def test_equal_heights_are_degenerate():
    a = Segment((0, 0, 0.5), (1, 1, 0.5))
    b = Segment((1, 0, 0.5), (0, 1, 0.5))
    with pytest.raises(DegenerateProjection):
        signed_crossing(a, b)


def test_touching_projection_is_degenerate():
    a = Segment((0, 0, 0), (1, 0, 0))
    b = Segment((0.5, 0, 1), (0.5, 1, 1))
    with pytest.raises(DegenerateProjection):
        signed_crossing(a, b)


@given(st.lists(point, min_size=4, max_size=4, unique=True))
def test_crossing_matches_exact_rationals(pts):
    a, b = Segment(pts[0], pts[1]), Segment(pts[2], pts[3])
    try:
        value = signed_crossing(a, b)
    except DegenerateProjection:
        return
    assert value == crossing_sign_exact(pts[0], pts[1], pts[2], pts[3])


@given(st.lists(point, min_size=4, max_size=4, unique=True))
def test_crossing_antisymmetric_and_symmetric(pts):
    a, b = Segment(pts[0], pts[1]), Segment(pts[2], pts[3])
    try:
        value = signed_crossing(a, b)
    except DegenerateProjection:
        return
    assert signed_crossing(b, a) == value
    assert signed_crossing(a.reversed(), b) == -value


# --- linking numbers --------------------------------------------------------


def test_separated_triangles_unlinked():
    assert linking_number(FAR_A, FAR_B) == 0
    assert linking_number_oracle(FAR_A, FAR_B) == 0


def test_hopf_triangles_link_once():
    # B's first edge is vertical, so +z (and +x) are degenerate for this pair
    with pytest.raises(DegenerateProjection):
        linking_number(HOPF_A, HOPF_B)
    value = linking_number(HOPF_A, HOPF_B, GENERIC)
    assert abs(value) == 1
    assert linking_number_oracle(HOPF_A, HOPF_B) == value


def test_hopf_triangles_tilted_along_z():
    B = HOPF_B.copy()
    B[1, :2] += (0.05, 0.02)
    assert abs(linking_number(HOPF_A, B)) == 1
    assert linking_number(HOPF_A, B) == linking_number_exact(HOPF_A, B)


def test_crossing_sum_is_twice_linking_number(rng):
    for _ in range(200):
        A, B = random_polygon(rng, 5), random_polygon(rng, 4)
        assert crossing_sum(A, B) == 2 * linking_number(A, B)


def test_projection_matches_exact_rationals(rng):
    for _ in range(300):
        A, B = random_polygon(rng, rng.integers(3, 7)), random_polygon(rng, rng.integers(3, 7))
        assert linking_number(A, B) == linking_number_exact(A, B)


def test_oracle_symmetric(rng):
    for _ in range(1000):
        A, B = random_polygon(rng, 3), random_polygon(rng, 4)
        assert linking_number_oracle(A, B) == linking_number_oracle(B, A)


def test_reversing_a_cycle_negates_linking(rng):
    for _ in range(200):
        A, B = random_polygon(rng, 4), random_polygon(rng, 5)
        assert linking_number(A[::-1], B) == -linking_number(A, B)
        assert linking_number(B, A) == linking_number(A, B)


def test_linking_invariant_under_direction(rng):
    for _ in range(50):
        A, B = random_polygon(rng, 4), random_polygon(rng, 4)
        base = linking_number(A, B)
        for d in ((1, 0, 0), (0, 1, 0), GENERIC):
            assert linking_number(A, B, d) == base


def test_rigid_motion_invariance(rng):
    for _ in range(100):
        A, B = random_polygon(rng, 4), random_polygon(rng, 5)
        R, t = rotation(rng), rng.normal(size=3)
        moved = linking_number(A @ R.T + t, B @ R.T + t, R @ Z_AXIS)
        assert moved == linking_number(A, B)


# --- directional writhe -----------------------------------------------------


def test_triangle_writhe_zero(rng):
    for _ in range(100):
        T = random_polygon(rng, 3)
        assert directional_writhe(T, sample_direction(rng)) == 0


def test_crossing_square_writhe():
    assert abs(directional_writhe(CROSSING_SQUARE)) == 1
    assert directional_writhe(CROSSING_SQUARE) == writhe_exact(CROSSING_SQUARE)


def test_writhe_same_for_antipodal_direction(rng):
    for _ in range(100):
        P = random_polygon(rng, 6)
        d = sample_direction(rng)
        assert directional_writhe(P, d) == directional_writhe(P, -d)


def test_writhe_matches_exact_rationals(rng):
    for _ in range(200):
        P = random_polygon(rng, rng.integers(4, 9))
        assert directional_writhe(P) == writhe_exact(P)


# --- directions -------------------------------------------------------------


def test_frame_is_right_handed(rng):
    for _ in range(100):
        d = sample_direction(rng)
        e1, e2 = frame(d)
        np.testing.assert_allclose(np.cross(e1, e2), d, atol=1e-12)
        assert abs(e1 @ d) < 1e-12 and abs(e2 @ d) < 1e-12


def test_project_along_z_is_identity_on_z():
    P = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]])
    np.testing.assert_allclose(project(P, np.array([0.0, 0.0, 1.0]))[:, 2], P[:, 2])


def test_sphere_directions_uniform():
    rng = np.random.default_rng(7)
    z = np.array([sample_direction(rng)[2] for _ in range(200_000)])
    assert abs(z.mean()) < 0.006
    assert abs((z > 0.5).mean() - 0.25) < 0.004


@pytest.mark.slow
def test_sphere_directions_uniform_full_scale():
    rng = np.random.default_rng(8)
    dirs = np.array([sample_direction(rng) for _ in range(1_000_000)])
    assert abs(dirs[:, 2].mean()) < 0.003
    assert abs((dirs[:, 2] > 0.5).mean() - 0.25) < 0.002
    assert np.max(np.abs(np.linalg.norm(dirs, axis=1) - 1.0)) < 1e-12
