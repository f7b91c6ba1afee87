import numpy as np
import pytest

from spps.core.grid import SampledFunction, cumulative_integral, make_grid, pointwise, sample
from spps.exceptions import (
    DivisionByZeroError,
    GridMismatchError,
    GridTooCoarseError,
    InvalidIntervalError,
    NonfiniteSampleError,
)


class TestMakeGrid:
    def test_nodes_and_step(self):
        grid = make_grid(0.0, 1.0, 10)
        assert grid.nodes.shape == (11,)
        assert grid.h == pytest.approx(0.1)
        assert grid.x0_index == 0
        assert grid.x0 == 0.0

    def test_rejects_reversed_interval(self):
        with pytest.raises(InvalidIntervalError):
            make_grid(1.0, 0.0, 10)

    def test_rejects_coarse_grid(self):
        with pytest.raises(GridTooCoarseError):
            make_grid(0.0, 1.0, 7)

    def test_anchor_snaps_to_nearest_node(self):
        grid = make_grid(0.0, 1.0, 10, x0=0.33)
        assert grid.x0_index == 3
        assert grid.snap_distance == pytest.approx(0.03)

    def test_anchor_outside_interval(self):
        with pytest.raises(InvalidIntervalError):
            make_grid(0.0, 1.0, 10, x0=2.0)

    def test_nodes_are_read_only(self):
        grid = make_grid(0.0, 1.0, 10)
        with pytest.raises(ValueError):
            grid.nodes[0] = 5.0

    def test_with_anchor_keeps_nodes(self):
        grid = make_grid(-1.0, 1.0, 20)
        centered = grid.with_anchor(0.0)
        assert centered.x0_index == 10
        np.testing.assert_array_equal(centered.nodes, grid.nodes)


class TestSampling:
    def test_constant_and_callable(self):
        grid = make_grid(0.0, 1.0, 8)
        assert np.all(sample(grid, 2.5).values == 2.5)
        np.testing.assert_allclose(sample(grid, np.sin).real, np.sin(grid.nodes))

    def test_scalar_only_callable(self):
        grid = make_grid(0.0, 1.0, 8)
        f = sample(grid, lambda x: 1.0 if x > 0.5 else 0.0)
        assert f.at(0) == 0
        assert f.at(8) == 1

    def test_nonfinite_reports_node(self):
        grid = make_grid(0.0, 1.0, 8)
        with pytest.raises(NonfiniteSampleError) as exc:
            sample(grid, lambda x: 1.0 / (x - grid.nodes[3]))
        assert exc.value.node_index == 3

    def test_wrong_length_rejected(self):
        grid = make_grid(0.0, 1.0, 8)
        with pytest.raises(ValueError):
            SampledFunction(grid, np.zeros(5))


class TestPointwise:
    def test_arithmetic(self):
        grid = make_grid(0.0, 1.0, 8)
        f = sample(grid, lambda x: x + 1.0)
        g = sample(grid, 2.0)
        np.testing.assert_allclose((f * g).real, 2 * (grid.nodes + 1))
        np.testing.assert_allclose((f / g).real, (grid.nodes + 1) / 2)
        np.testing.assert_allclose((1.0 / f).real, 1 / (grid.nodes + 1))
        np.testing.assert_allclose((3.0 - f).real, 2 - grid.nodes)

    def test_division_by_zero(self):
        grid = make_grid(0.0, 1.0, 8)
        f = sample(grid, lambda x: x)
        with pytest.raises(DivisionByZeroError) as exc:
            pointwise("reciprocal", f)
        assert exc.value.node_index == 0

    def test_grid_mismatch(self):
        f = sample(make_grid(0.0, 1.0, 8), 1.0)
        g = sample(make_grid(0.0, 1.0, 16), 1.0)
        with pytest.raises(GridMismatchError):
            f + g

    def test_unknown_op(self):
        f = sample(make_grid(0.0, 1.0, 8), 1.0)
        with pytest.raises(ValueError, match="op must be one of"):
            pointwise("power", f, 2)


class TestCumulativeIntegral:
    def test_cubic_is_exact(self):
        grid = make_grid(0.0, 2.0, 8)
        F = cumulative_integral(sample(grid, lambda x: x**3 - x))
        np.testing.assert_allclose(F.real, grid.nodes**4 / 4 - grid.nodes**2 / 2, atol=1e-13)

    def test_vanishes_at_anchor(self):
        grid = make_grid(-1.0, 1.0, 40, x0=0.0)
        F = cumulative_integral(sample(grid, np.cos))
        assert F.at(grid.x0_index) == 0
        np.testing.assert_allclose(F.real, np.sin(grid.nodes), atol=1e-8)

    def test_complex_values(self):
        grid = make_grid(0.0, 1.0, 200)
        F = sample(grid, lambda x: np.exp(1j * x)).integral()
        expected = (np.exp(1j * grid.nodes) - 1) / 1j
        np.testing.assert_allclose(F.values, expected, atol=1e-10)

    def test_simpson_agrees_with_spline(self):
        grid = make_grid(0.0, np.pi, 400)
        f = sample(grid, np.sin)
        spline = cumulative_integral(f, "spline")
        simpson = cumulative_integral(f, "simpson")
        assert abs(spline.at(grid.m) - 2.0) < 1e-10
        assert abs(simpson.at(grid.m) - 2.0) < 1e-8

    @pytest.mark.parametrize("method", ["spline", "simpson"])
    def test_linearity(self, method, rng):
        grid = make_grid(0.0, 2.0, 300)
        f = sample(grid, lambda x: np.exp(-x) * np.sin(5 * x))
        g = sample(grid, lambda x: 1.0 / (1.0 + x * x))
        for alpha, beta in rng.uniform(-3.0, 3.0, size=(20, 2)):
            combined = cumulative_integral(alpha * f + beta * g, method)
            separate = alpha * cumulative_integral(f, method) + beta * cumulative_integral(g, method)
            np.testing.assert_allclose(combined.values, separate.values, atol=1e-13)

    def test_spline_is_fourth_order(self):
        def error(m):
            grid = make_grid(0.0, 1.0, m)
            F = cumulative_integral(sample(grid, lambda x: np.exp(x) * np.cos(3 * x)))
            x = grid.nodes
            exact = (np.exp(x) * (np.cos(3 * x) + 3 * np.sin(3 * x)) - 1.0) / 10.0
            return np.max(np.abs(F.real - exact))

        coarse, fine = error(40), error(80)
        assert 10.0 < coarse / fine < 24.0

    def test_unknown_method(self):
        f = sample(make_grid(0.0, 1.0, 8), 1.0)
        with pytest.raises(ValueError, match="method must be one of"):
            cumulative_integral(f, "trapezoid")

    def test_spline_derivative(self):
        grid = make_grid(0.0, np.pi, 400)
        d = sample(grid, np.sin).derivative()
        np.testing.assert_allclose(d.real[5:-5], np.cos(grid.nodes)[5:-5], atol=1e-7)
