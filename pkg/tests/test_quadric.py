import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympack import SampleCloud, mc_volume, pullback_defect
from sympack.model_spaces import loop_residual, solve_h
from sympack.projective import ProjectivePoint, fs_distance
from sympack.quadric import (FIBER_AREA, LunePartition, NearRealError, QuadricPoint,
                             _fiber_density, area_coords, disc_abscissa, fiber_area_profile,
                             fiber_points, normalized_radius, pencil, pencil_parameter,
                             profile_radius, project_arrays, project_to_quadric, q_value,
                             quadric_area, quadric_param, raw_radius)


def _random_quadric(rng, n):
    s = rng.normal(size=n) + 1j * rng.normal(size=n)
    t = rng.normal(size=n) + 1j * rng.normal(size=n)
    return pencil(s, t)


def _random_w(rng, n, top=0.99):
    return rng.uniform(1e-3, top, n) * np.exp(2j * np.pi * rng.uniform(size=n))


def test_quadric_param_examples():
    p = quadric_param((1, 0))
    assert np.allclose(p.vector * np.sqrt(2), [1, 1j, 0])
    assert q_value(p.point.vector) == 0
    p = quadric_param((1, 1))
    assert fs_distance(p.vector[None], np.array([[0, 1j, 1]]))[0] < 1e-12
    assert abs(q_value(quadric_param(np.inf).vector)) == 0


def test_quadric_point_rejects_off_quadric():
    with pytest.raises(ValueError):
        QuadricPoint(ProjectivePoint(1, 0, 0), (1, 0))


def test_quadric_area_is_two_pi():
    assert quadric_area() == pytest.approx(2 * np.pi, abs=1e-5)


def test_pencil_parameter_round_trip_including_poles():
    rng = np.random.default_rng(3)
    x = np.vstack([_random_quadric(rng, 200), pencil(1, 0)[None], pencil(0, 1)[None]])
    s, t = pencil_parameter(x)
    assert np.all(s.real >= 0) and np.allclose(s.imag, 0)
    assert np.max(fs_distance(pencil(s, t), x)) < 1e-12


def test_point_on_quadric_has_zero_fiber_coordinate():
    x = quadric_param(0.3 + 0.7j)
    fc = project_to_quadric(x.point)
    assert abs(fc.w) < 1e-12
    assert fs_distance(fc.base.vector[None], x.vector[None])[0] < 1e-12


def test_near_real_points_rejected():
    with pytest.raises(NearRealError):
        project_to_quadric(np.array([1.0, 2.0, -0.5]))
    x, w = project_arrays(np.array([[1.0, 2.0, -0.5], [1, 1j, 0]]))
    assert np.isnan(w[0]) and np.isfinite(w[1])


def test_projection_round_trip_thousand_samples():
    rng = np.random.default_rng(0)
    x, w = _random_quadric(rng, 1000), _random_w(rng, 1000)
    Z = fiber_points(x, w)
    xr, wr = project_arrays(Z)
    assert np.max(np.abs(wr - w)) < 1e-8
    assert np.max(fs_distance(xr, x)) < 1e-8


@given(st.floats(0.01, 0.99), st.floats(0, 2 * np.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_scalar_projection_round_trip(rho, a, tr, ti):
    x = quadric_param(tr + 1j * ti)
    w = rho * np.exp(1j * a)
    fc = project_to_quadric(x.vector + w * np.conj(x.vector))
    # x is defined up to phase, which rotates w by the square of that phase
    c = np.vdot(x.vector, fc.base.vector)
    assert abs(fc.w - w * np.conj(c / abs(c)) ** 2) < 1e-8
    assert fc.s == pytest.approx(float(normalized_radius(rho)), abs=1e-12)


def test_exactly_one_root_inside_the_disc():
    # both roots of conj(q) l^2 + 2 l + q = 0 for unit z; the fiber coordinate is -l
    rng = np.random.default_rng(1)
    Z = rng.normal(size=(10_000, 3)) + 1j * rng.normal(size=(10_000, 3))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    q = q_value(Z)
    disc = np.sqrt(1 - np.abs(q) ** 2)
    roots = np.stack([(-1 + disc) / np.conj(q), (-1 - disc) / np.conj(q)], axis=1)
    inside = np.abs(roots) < 1
    assert np.all(inside.sum(axis=1) == 1)
    _, w = project_arrays(Z)
    assert np.allclose(np.abs(w), np.abs(roots[inside]), atol=1e-9)


def test_fiber_area_profile_limits():
    rng = np.random.default_rng(7)
    xs = _random_quadric(rng, 20)
    for x in xs:
        prof = fiber_area_profile(x)
        assert prof(0.0) == 0.0
        assert prof(1.0) == pytest.approx(FIBER_AREA, abs=1e-5)


def test_fiber_area_profile_increasing_and_closed_form():
    x = quadric_param(0.4 - 1.1j).vector
    prof = fiber_area_profile(x)
    grid = np.linspace(0, 1, 64)
    vals = np.array([prof(r) for r in grid])
    assert np.all(np.diff(vals) > 0)
    assert np.allclose(vals, np.pi * grid**2 / (1 + grid**2), atol=1e-10)


def test_fiber_density_positive():
    x = quadric_param(2.0 + 0.5j).vector
    assert np.all(_fiber_density(x, np.linspace(0, 0.999, 200)) > 0)


def test_profile_radius_inverts_normalization():
    x = quadric_param(0.1j).vector
    for s in (0.1, 0.5, 0.9):
        assert profile_radius(x, s) == pytest.approx(float(raw_radius(s)), abs=1e-9)
    assert np.allclose(normalized_radius(raw_radius(np.linspace(0, 0.99, 50))),
                       np.linspace(0, 0.99, 50))


def test_disc_abscissa_inverts_area_fraction():
    v = np.linspace(0, 1, 101)
    X = disc_abscissa(v)
    frac = (X * np.sqrt(1 - X * X) + np.arcsin(X)) / np.pi + 0.5
    # the area fraction is flat at the ends, so only the interior inverts to rounding level
    assert np.max(np.abs(frac - v)[1:-1]) < 1e-13
    assert np.max(np.abs(frac - v)) < 1e-9


@pytest.mark.parametrize("n", [4, 5])
def test_lune_areas_equal(n):
    part = LunePartition(n)
    areas = part.piece_areas()
    assert sum(areas) == pytest.approx(2 * np.pi, abs=1e-6)
    assert np.allclose(areas, 2 * np.pi / n, atol=1e-6)
    assert max(areas) - min(areas) < 1e-6


def test_lune_disc_map_round_trip():
    part = LunePartition(5)
    rng = np.random.default_rng(4)
    zb = part.disc_radius * np.sqrt(rng.uniform(0, 0.98, 500)) * np.exp(2j * np.pi * rng.uniform(size=500))
    t = part.from_disc(2, zb)
    x = pencil(np.ones_like(t), t)
    assert np.all(part.index(x) == 2)
    assert np.max(np.abs(part.to_disc(2, x) - zb)) < 1e-9


def test_lune_disc_map_preserves_area_fraction():
    # the cumulative-area coordinate v is the area fraction of the quadric below |t|
    part = LunePartition(4)
    v, _ = area_coords(pencil(1, 0.7 * np.exp(0.3j))[None])
    assert v[0] == pytest.approx(0.49 / 1.49)
    assert quadric_area(0, 2 * np.pi) * v[0] == pytest.approx(
        2 * np.pi * 0.49 / 1.49, abs=1e-5)
    assert part.piece_area == pytest.approx(np.pi / 2)


def test_lune_potential_matches_numerical_solve():
    part = LunePartition(5)
    h_num = solve_h(part.model())
    rng = np.random.default_rng(9)
    z = part.disc_radius * 0.8 * np.sqrt(rng.uniform(size=40)) * np.exp(2j * np.pi * rng.uniform(size=40))
    assert np.max(np.abs(h_num(z[:, None]) - part.h_closed_form(z))) < 1e-6


def test_lune_beta_closed():
    part = LunePartition(5)
    model = part.model()
    rng = np.random.default_rng(2)
    tri = 0.3 * (rng.uniform(-1, 1, (20, 3)) + 1j * rng.uniform(-1, 1, (20, 3)))
    assert np.max(np.abs(loop_residual(model.beta, 1, tri[:, :, None]))) < 1e-8


@pytest.mark.parametrize("name", ["full4", "regular5"])
def test_lune_ball_pullback(name, request):
    p = request.getfixturevalue(name)
    for b in p:
        cloud = SampleCloud.ball(b.radius, 10_000, seed=11)
        d = pullback_defect(b, cloud, mode="fd", fd_step=1e-6)
        assert d.max_abs < 1e-4
        assert not d.failed


@pytest.mark.parametrize("name", ["full4", "regular5"])
def test_lune_ball_inverse_round_trip(name, request):
    p = request.getfixturevalue(name)
    b = p[1]
    x = SampleCloud.ball(b.radius, 2000, seed=5, shrink=0.95).points
    assert np.nanmax(np.abs(b.inverse(b.map(x)) - x)) < 1e-8
    assert np.nanmax(np.abs(b.radial(b.map(x)) - np.linalg.norm(x, axis=1))) < 1e-8


def test_full4_volumes(full4):
    est, err = mc_volume(lambda Z: np.any([b.contains(Z) for b in full4], axis=0), 200_000, seed=3)
    assert abs(est - np.pi**2 / 2) <= 3 * err + 1e-12
    for region in full4.regions:
        est, err = mc_volume(region, 100_000, seed=4)
        assert abs(est - np.pi**2 / 8) <= 3 * err


def test_regular5_volumes(regular5):
    for b in regular5:
        est, err = mc_volume(b.contains, 100_000, seed=6)
        assert abs(est - 2 * np.pi**2 / 25) <= 3 * err
    for region in regular5.regions:
        est, err = mc_volume(region, 100_000, seed=8)
        assert abs(est - np.pi**2 / 10) <= 3 * err


def test_regular5_singular_set_is_pole_fibers(regular5):
    b = regular5[0]
    assert len(b.singular_set) == 2
    assert b.singular_kind == "pole fibers"
    R = b.radius
    assert R**2 == pytest.approx(0.4)


def test_regions_are_disjoint(regular5):
    pts = SampleCloud.cp2(100_000, seed=2).points
    member = np.array([r(pts) for r in regular5.regions])
    assert np.all(member.sum(axis=0) <= 1)
    # images of different balls never coincide
    for i, b in enumerate(regular5):
        Z = b.map(SampleCloud.ball(b.radius, 2000, seed=i, shrink=0.999).points)
        others = [j for j in range(5) if j != i]
        assert not np.any([regular5[j].radial(Z) < regular5[j].radius - 1e-9 for j in others])
