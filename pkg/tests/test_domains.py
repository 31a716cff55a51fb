import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skorokhod_kit import (
    ConvexDomain,
    ProjectionIterationError,
    active_normal_cone,
    ball_domain,
    half_line,
    halfplane,
    orthant,
    project,
    strip,
    unit_disc,
)


def brute_force_nearest(x, candidates):
    """Independent oracle: nearest point among a dense feasible sample."""
    d2 = np.sum((candidates - x) ** 2, axis=1)
    return candidates[np.argmin(d2)]


def test_halfspace_projection_analytic():
    assert np.allclose(project([1.0, -1.0], halfplane()), [1.0, 0.0], atol=0.0)
    assert np.array_equal(project([1.0, 2.0], halfplane()), [1.0, 2.0])


def test_ball_projection_radial():
    assert np.allclose(project([2.0, 0.0], unit_disc()), [1.0, 0.0], atol=1e-15)
    inside = project([0.3, 0.1], unit_disc())
    assert np.array_equal(inside, [0.3, 0.1])


def test_orthant_corner_projection_with_brute_force_oracle():
    # oracle first: scan a feasible grid for the nearest point to (-1, -1)
    xs = np.linspace(0.0, 2.0, 201)
    grid_pts = np.array([[a, b] for a in xs for b in xs])
    oracle = brute_force_nearest([-1.0, -1.0], grid_pts)
    assert np.allclose(oracle, [0.0, 0.0], atol=1e-12)
    assert np.allclose(project([-1.0, -1.0], orthant(2)), [0.0, 0.0], atol=1e-12)


def test_identity_on_closure_is_exact():
    dom = orthant(2)
    for x in ([0.0, 0.0], [0.0, 2.0], [1.5, 0.5]):
        assert np.array_equal(dom.project(np.array(x)), x)


def test_projection_onto_intersection_with_ball():
    # upper half of the unit disc; pull toward the lower-left outside corner
    dom = ConvexDomain(
        2,
        normals=[[0.0, 1.0]],
        offsets=[0.0],
        centers=[[0.0, 0.0]],
        radii=[1.0],
        interior_point=[0.0, 0.5],
    )
    p = dom.project(np.array([-2.0, -0.5]))
    assert np.min(dom.slacks(p)) >= -1e-10
    # oracle: parameterize the feasible set densely
    xs = np.linspace(-1.0, 1.0, 401)
    ys = np.linspace(0.0, 1.0, 201)
    pts = np.array([[a, b] for a in xs for b in ys if a * a + b * b <= 1.0])
    oracle = brute_force_nearest([-2.0, -0.5], pts)
    assert np.linalg.norm(p - oracle) < 6e-3  # oracle grid resolution


point_2d = st.tuples(
    st.floats(-5.0, 5.0, allow_nan=False), st.floats(-5.0, 5.0, allow_nan=False)
).map(np.array)


@settings(max_examples=60, deadline=None)
@given(point_2d)
def test_projection_idempotent(x):
    dom = unit_disc()
    p = dom.project(x)
    q = dom.project(p)
    assert np.linalg.norm(p - q) <= 2e-10


@settings(max_examples=60, deadline=None)
@given(point_2d, point_2d)
def test_projection_nonexpansive(x, y):
    for dom in (orthant(2), unit_disc(), strip()):
        px, py = dom.project(x), dom.project(y)
        assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 2e-10


@settings(max_examples=60, deadline=None)
@given(point_2d, point_2d)
def test_projection_variational_inequality(x, q_raw):
    # <x - Px, q - Px> <= tol (1 + |q|) for q in the closure
    for dom in (orthant(2), unit_disc()):
        p = dom.project(x)
        q = dom.project(q_raw)
        inner = float((x - p) @ (q - p))
        assert inner <= 1e-10 * (1.0 + np.linalg.norm(q))


def test_iteration_limit_error_carries_state():
    dom = orthant(2)
    with pytest.raises(ProjectionIterationError) as err:
        dom._dykstra(np.array([-1.0, -1.0]), tol=1e-10, max_iter=1)
    assert err.value.last_iterate.shape == (2,)
    assert len(err.value.residual) == 2


def test_domain_constructor_validation():
    with pytest.raises(ValueError):
        ConvexDomain(2, normals=[[1.0, 1.0]], offsets=[0.0], interior_point=[1.0, 1.0])
    with pytest.raises(ValueError):
        ConvexDomain(2, normals=[[1.0, 0.0]], offsets=[0.0], interior_point=[-1.0, 0.0])
    with pytest.raises(ValueError):
        ConvexDomain(2, interior_point=[0.0, 0.0])  # no constraints
    with pytest.raises(ValueError):
        ball_domain([0.0], -1.0)
    with pytest.raises(ValueError):
        ConvexDomain(2, normals=[[1.0, 0.0]], offsets=[0.0], interior_point=None)


def test_active_normal_cone_single_face():
    cone = active_normal_cone([3.0, 0.0], halfplane())
    assert np.allclose(cone, [[0.0, 1.0]])


def test_active_normal_cone_corner():
    cone = active_normal_cone([0.0, 0.0], orthant(2))
    assert cone.shape == (2, 2)
    assert np.allclose(sorted(map(tuple, cone)), [[0.0, 1.0], [1.0, 0.0]])


def test_active_normal_cone_ball():
    cone = active_normal_cone([0.0, -1.0], unit_disc())
    assert np.allclose(cone, [[0.0, 1.0]], atol=1e-12)


def test_active_normal_cone_preconditions():
    with pytest.raises(ValueError):
        active_normal_cone([5.0, 5.0], orthant(2))  # deep interior
    with pytest.raises(ValueError):
        active_normal_cone([-1.0, -1.0], orthant(2))  # far outside


def test_distance_to_boundary():
    dom = unit_disc()
    assert dom.distance_to_boundary(np.array([0.0, 0.0])) == pytest.approx(1.0)
    assert dom.distance_to_boundary(np.array([2.0, 0.0])) == pytest.approx(1.0)
    assert dom.distance_to_boundary(np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)


def test_project_batch_matches_pointwise():
    dom = ConvexDomain(
        2,
        normals=[[0.0, 1.0]],
        offsets=[0.0],
        centers=[[0.0, 0.5]],
        radii=[2.0],
        interior_point=[0.0, 0.5],
    )
    gen = np.random.Generator(np.random.Philox(key=np.array([1, 2], dtype=np.uint64)))
    pts = gen.normal(scale=2.5, size=(200, 2))
    batch = dom.project_batch(pts)
    single = np.array([dom.project(p) for p in pts])
    assert np.allclose(batch, single, atol=1e-12)


def test_half_line_projection_is_clamp():
    dom = half_line()
    assert dom.project(np.array([-0.7]))[0] == 0.0
    assert dom.project(np.array([0.7]))[0] == 0.7
