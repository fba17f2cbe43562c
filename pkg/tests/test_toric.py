from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympack import SampleCloud, mc_volume, pullback_defect
from sympack.embedding import CapacityError, standard_chart_ball
from sympack.projective import fs_distance
from sympack.toric import (CORNERS, ContainmentError, MomentTriangle, corner_triangle,
                           karshon_packing, moment_map, toric_ball, triangles_disjoint)


def test_chart_ball_origin_and_capacity():
    b = standard_chart_ball(0.5)
    assert np.allclose(b.map(np.zeros((1, 2))), [[0, 0, 1]])
    with pytest.raises(CapacityError):
        standard_chart_ball(1.01)


def test_full_chart_ball_fills_cp2():
    b = standard_chart_ball(1.0)
    est, err = mc_volume(lambda Z: b.radial(Z) < 1, 100_000, seed=1)
    assert abs(est - np.pi**2 / 2) <= 3 * err + 1e-12


def test_corner_matrices_are_unimodular():
    for cols in CORNERS.values():
        assert abs(round(np.linalg.det(np.array(cols, float)))) == 1


def test_degenerate_and_outside_triangles_rejected():
    with pytest.raises(ContainmentError):
        corner_triangle(0, 0)
    with pytest.raises(ContainmentError):
        corner_triangle(1, Fraction(3, 5))
    with pytest.raises(ContainmentError):
        MomentTriangle((0, 0), ((2, 0), (0, 1)), Fraction(1, 8))


@pytest.mark.parametrize("corner", [0, 1, 2])
def test_corner_balls_are_exact(corner):
    b = toric_ball(corner_triangle(corner, Fraction(1, 4)))
    assert b.radius == pytest.approx(1 / np.sqrt(2))
    d = pullback_defect(b, SampleCloud.ball(b.radius, 10_000, seed=corner))
    assert d.max_abs < 1e-8


def test_moment_image_is_the_corner_simplex():
    tri = corner_triangle(0, Fraction(1, 4))
    b = toric_ball(tri)
    mu = moment_map(b.map(SampleCloud.ball(b.radius, 20_000, seed=2).points))
    assert np.all(mu >= -1e-12) and np.all(mu.sum(axis=1) < 0.25 + 1e-12)
    # every point of the simplex is within 1e-3 of an image point
    g = np.stack(np.meshgrid(np.linspace(0, 0.25, 26), np.linspace(0, 0.25, 26)), -1).reshape(-1, 2)
    g = g[g.sum(axis=1) < 0.25]
    from scipy.spatial import cKDTree
    dist, _ = cKDTree(mu).query(g)
    assert dist.max() < 1e-2
    d2, _ = cKDTree(g).query(mu)
    assert d2.max() < 1e-2


@given(st.integers(0, 2), st.floats(0.05, 0.99), st.floats(0, 1), st.floats(0, 2 * np.pi),
       st.floats(0, 2 * np.pi))
def test_inverse_round_trip(corner, rad, split, a, c):
    b = toric_ball(corner_triangle(corner, Fraction(1, 4)))
    r = rad * b.radius
    x = np.array([[r * np.sqrt(split) * np.exp(1j * a), r * np.sqrt(1 - split) * np.exp(1j * c)]])
    Z = b.map(x)
    assert np.allclose(b.inverse(Z), x, atol=1e-9)
    assert b.radial(Z)[0] == pytest.approx(r, abs=1e-12)


def test_inverse_on_the_hypotenuse_preimage():
    # for corner (1/2, 0) the domain axis x_1 = 0 maps to Z_2 = 0
    b = toric_ball(corner_triangle(1, Fraction(1, 4)))
    x = np.array([[0, 0.4 * np.exp(0.7j)]])
    assert abs(b.map(x)[0, 2]) < 1e-15
    assert np.allclose(b.inverse(b.map(x)), x, atol=1e-12)


def test_jacobian_on_axes_matches_finite_differences():
    b = toric_ball(corner_triangle(2, Fraction(1, 4)))
    x = np.array([[0.3, 0], [0, 0.2j], [0.1 + 0.1j, 0.2]])
    Z, J = b.tangent_map(x)
    from sympack.projective import fd_projective_jacobian, fs_gram
    Zf, Jf = fd_projective_jacobian(b.map, x, 1e-6)
    assert np.allclose(fs_gram(Z, J), fs_gram(Zf, Jf), atol=1e-6)


def test_symmetric_corners_agree():
    # the ambient symmetries permute corners: equal volumes and gates
    vols = []
    for c in range(3):
        b = toric_ball(corner_triangle(c, Fraction(1, 8)))
        est, err = mc_volume(b.contains, 100_000, seed=3)
        vols.append((est, err))
        assert pullback_defect(b, SampleCloud.ball(b.radius, 2000, seed=4)).max_abs < 1e-8
    for est, err in vols:
        assert abs(est - vols[0][0]) < 3 * (err + vols[0][1])


@pytest.mark.parametrize("r1", [0.5, 0.6, 0.8])
def test_two_ball_fill(r1):
    p = karshon_packing("two_balls", r1)
    assert p.radii[1] == pytest.approx(np.sqrt(1 - r1**2))
    est, err = mc_volume(lambda Z: p[0].contains(Z) | p[1].contains(Z), 200_000, seed=5)
    fill = r1**4 + (1 - r1**2) ** 2
    assert abs(est / (np.pi**2 / 2) - fill) < 3 * err / (np.pi**2 / 2)


def test_three_ball_fill_and_disjoint_triangles():
    p = karshon_packing("three_balls")
    tris = [b.info["triangle"] for b in p]
    assert all(triangles_disjoint(a, b) for i, a in enumerate(tris) for b in tris[i + 1:])
    est, err = mc_volume(lambda Z: np.any([b.contains(Z) for b in p], axis=0), 200_000, seed=6)
    assert abs(est / (np.pi**2 / 2) - 0.75) < 3 * err / (np.pi**2 / 2)


def test_overlapping_triangles_detected():
    assert not triangles_disjoint(corner_triangle(0, Fraction(3, 10)), corner_triangle(1, Fraction(3, 10)))


def test_two_ball_parameter_range():
    for bad in (0, 1, 1.2, None):
        with pytest.raises(ValueError):
            karshon_packing("two_balls", bad)
    with pytest.raises(ValueError):
        karshon_packing("four_balls")


def test_interior_images_never_coincide(karshon3):
    # images of distinct balls are far apart in CP^2 unless near the shared boundary
    pts = [b.image(SampleCloud.ball(b.radius, 20_000, seed=9 + i, shrink=0.99).points)
           for i, b in enumerate(karshon3)]
    for i in range(3):
        for j in range(i + 1, 3):
            assert fs_distance(pts[i][:2000, None, :], pts[j][None, :2000, :]).min() > 1e-9
