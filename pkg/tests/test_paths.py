import numpy as np
import pytest

from skorokhod_kit import PathKind, SampledPath, TimeGrid


def test_uniform_grid_matches_arithmetic_sequence():
    T, n = 1.0, 3
    grid = TimeGrid.uniform(T, n)
    expected = np.array([k * (T / n) for k in range(n + 1)])
    assert np.array_equal(grid.times, expected)
    assert grid.times[0] == 0.0
    assert grid.horizon == grid.times[-1]


def test_uniform_grid_is_close_to_exact_ratio():
    grid = TimeGrid.uniform(math_t := 0.7, 13)
    for k, t in enumerate(grid.times):
        assert t == pytest.approx(k * math_t / 13, rel=4e-16, abs=0.0)


@pytest.mark.parametrize(
    "times",
    [
        [0.0],  # too short
        [0.0, 1.0, 1.0],  # zero step
        [0.0, 2.0, 1.0],  # decreasing
        [0.5, 1.0],  # does not start at 0
        [0.0, np.inf],
    ],
)
def test_bad_grids_rejected(times):
    with pytest.raises(ValueError):
        TimeGrid(np.array(times))


def test_degenerate_uniform_grid_rejected():
    with pytest.raises(ValueError):
        TimeGrid.uniform(1.0, 0)
    with pytest.raises(ValueError):
        TimeGrid.uniform(0.0, 10)


def test_sampled_path_shapes_and_dim():
    grid = TimeGrid.uniform(1.0, 2)
    p1 = SampledPath.continuous(grid, [0.0, 1.0, 2.0])
    assert p1.dim == 1
    assert p1.values.shape == (3, 1)
    assert np.array_equal(p1.scalar_values, [0.0, 1.0, 2.0])
    p2 = SampledPath.step(grid, np.zeros((3, 2)))
    assert p2.dim == 2
    with pytest.raises(ValueError):
        p2.scalar_values


def test_sampled_path_validation():
    grid = TimeGrid.uniform(1.0, 2)
    with pytest.raises(ValueError):
        SampledPath.continuous(grid, [0.0, 1.0])  # wrong length
    with pytest.raises(ValueError):
        SampledPath.continuous(grid, [0.0, np.nan, 1.0])


def test_values_frozen():
    grid = TimeGrid.uniform(1.0, 2)
    p = SampledPath.continuous(grid, [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        p.values[0, 0] = 5.0
    with pytest.raises(ValueError):
        grid.times[0] = 1.0


def test_value_at_interpolation_rules():
    grid = TimeGrid(np.array([0.0, 1.0, 3.0]))
    cont = SampledPath.continuous(grid, [0.0, 2.0, 4.0])
    step = SampledPath.step(grid, [0.0, 2.0, 4.0])
    assert cont.value_at(0.5) == pytest.approx(1.0)
    assert cont.value_at(2.0) == pytest.approx(3.0)
    assert step.value_at(0.5) == 0.0
    assert step.value_at(1.0) == 2.0  # right continuous
    assert step.value_at(2.9) == 2.0
    assert step.value_at(3.0) == 4.0
    with pytest.raises(ValueError):
        cont.value_at(-0.1)


def test_with_kind_and_scale():
    grid = TimeGrid.uniform(1.0, 2)
    p = SampledPath.continuous(grid, [0.0, -3.0, 2.0])
    assert p.with_kind(PathKind.STEP).kind is PathKind.STEP
    assert p.scale() == 3.0
    tiny = SampledPath.continuous(grid, [0.0, 0.1, 0.2])
    assert tiny.scale() == 1.0
