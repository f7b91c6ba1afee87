"""
Uniform grids and complex sampled functions.

Every recursive integral of the method runs through ``cumulative_integral``:
real and imaginary parts are interpolated by a not-a-knot cubic spline and the
spline is integrated exactly, segment by segment, from the anchor node x0.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from spps.exceptions import (
    DivisionByZeroError,
    GridMismatchError,
    GridTooCoarseError,
    InvalidIntervalError,
    NonfiniteSampleError,
)
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

MIN_SUBINTERVALS = 8
QUADRATURES = ("spline", "simpson")


@dataclass(frozen=True)
class Grid:
    """Uniform grid a = x_0 < ... < x_m = b with a marked anchor node."""

    a: float
    b: float
    m: int
    x0_index: int = 0
    snap_distance: float = 0.0

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.a, self.b, self.m + 1)
        nodes.setflags(write=False)
        return nodes

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def x0(self) -> float:
        return float(self.nodes[self.x0_index])

    @property
    def length(self) -> float:
        return self.b - self.a

    def index_of(self, x: float) -> int:
        """Nearest node index to ``x`` (clipped to the grid)."""
        i = int(round((x - self.a) / self.h))
        return min(max(i, 0), self.m)

    def with_anchor(self, x0: float) -> Grid:
        """Same nodes, anchored at the node nearest to ``x0``."""
        return make_grid(self.a, self.b, self.m, x0)


def make_grid(a: float, b: float, m: int, x0: float | None = None) -> Grid:
    """
    Build a uniform grid over [a, b] with m subintervals.

    Args:
        a: Left endpoint
        b: Right endpoint
        m: Number of subintervals (at least 8)
        x0: Anchor point, snapped to the nearest node (defaults to a)

    Returns:
        Grid with ``x0_index`` at the snapped node and the snap distance recorded

    Raises:
        InvalidIntervalError: If a >= b
        GridTooCoarseError: If m < 8
    """
    if not a < b:
        raise InvalidIntervalError(f"Interval endpoints must satisfy a < b, got a={a}, b={b}")
    if m < MIN_SUBINTERVALS:
        raise GridTooCoarseError(f"Grid needs at least {MIN_SUBINTERVALS} subintervals, got m={m}")
    if x0 is None:
        x0 = a
    if not a <= x0 <= b:
        raise InvalidIntervalError(f"Anchor x0={x0} lies outside [{a}, {b}]")
    h = (b - a) / m
    index = min(max(int(round((x0 - a) / h)), 0), m)
    snap = abs(a + index * h - x0)
    if snap > 0.0:
        logger.debug(f"Snapped x0={x0} to node {index} (distance {snap:.3e})")
    return Grid(a=float(a), b=float(b), m=int(m), x0_index=index, snap_distance=snap)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex values of a function at the nodes of a grid (read-only)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.m + 1,):
            raise ValueError(
                f"Expected {self.grid.m + 1} samples for this grid, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: Grid, value: complex) -> SampledFunction:
        return cls(grid, np.full(grid.m + 1, value, dtype=complex))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def at(self, index: int) -> complex:
        return complex(self.values[index])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_abs(self) -> float:
        return float(np.min(np.abs(self.values)))

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> SampledFunction:
        """Pointwise image under a vectorized function (e.g. np.exp)."""
        return _checked(self.grid, fn(self.values))

    def conj(self) -> SampledFunction:
        return SampledFunction(self.grid, np.conj(self.values))

    def integral(self, method: str = "spline") -> SampledFunction:
        return cumulative_integral(self, method=method)

    def derivative(self, order: int = 1) -> SampledFunction:
        """Spline derivative of the samples (not used for series derivatives)."""
        spline = CubicSpline(self.grid.nodes, _split(self.values), axis=0)
        d = spline.derivative(order)(self.grid.nodes)
        return SampledFunction(self.grid, d[:, 0] + 1j * d[:, 1])

    def __add__(self, other):
        return pointwise("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return pointwise("subtract", self, other)

    def __rsub__(self, other):
        return pointwise("add", -self, other)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            return pointwise("multiply", self, other)
        return pointwise("scale", self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SampledFunction):
            return pointwise("divide", self, other)
        return pointwise("scale", self, 1.0 / other)

    def __rtruediv__(self, other):
        return pointwise("scale", pointwise("reciprocal", self), other)

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)


def _split(values: np.ndarray) -> np.ndarray:
    return np.column_stack([values.real, values.imag])


def _checked(grid: Grid, values) -> SampledFunction:
    values = np.broadcast_to(np.asarray(values, dtype=complex), (grid.m + 1,))
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonfiniteSampleError(
            f"Nonfinite value {values[bad[0]]} at node {bad[0]}", node_index=int(bad[0])
        )
    return SampledFunction(grid, values)


def sample(grid: Grid, f: Callable | complex | float) -> SampledFunction:
    """
    Evaluate ``f`` at every node of ``grid``.

    ``f`` may be a constant, a vectorized callable, or a scalar callable.

    Raises:
        NonfiniteSampleError: With the index of the first offending node
    """
    if not callable(f):
        return _checked(grid, f)
    nodes = grid.nodes
    try:
        values = f(nodes)
        values = np.broadcast_to(np.asarray(values, dtype=complex), nodes.shape)
    except (TypeError, ValueError):
        values = np.array([f(float(x)) for x in nodes], dtype=complex)
    return _checked(grid, values)


def pointwise(op: str, f: SampledFunction, g=None) -> SampledFunction:
    """
    Pointwise algebra on sampled functions.

    Args:
        op: One of multiply, divide, add, subtract, scale, reciprocal
        f: Left operand
        g: Right operand (sampled function or scalar; unused for reciprocal)

    Raises:
        GridMismatchError: If f and g live on different grids
        DivisionByZeroError: If a denominator vanishes at a node
    """
    if isinstance(g, SampledFunction):
        if g.grid != f.grid:
            raise GridMismatchError(f"Operands live on different grids: {f.grid} vs {g.grid}")
        other = g.values
    else:
        other = g

    if op == "reciprocal":
        return pointwise("divide", SampledFunction.constant(f.grid, 1.0), f)
    if op == "multiply" or op == "scale":
        return SampledFunction(f.grid, f.values * other)
    if op == "add":
        return SampledFunction(f.grid, f.values + other)
    if op == "subtract":
        return SampledFunction(f.grid, f.values - other)
    if op == "divide":
        denominator = np.broadcast_to(np.asarray(other, dtype=complex), f.values.shape)
        zeros = np.flatnonzero(denominator == 0)
        if zeros.size:
            raise DivisionByZeroError(
                f"Division by zero at node {zeros[0]}", node_index=int(zeros[0])
            )
        return SampledFunction(f.grid, f.values / denominator)
    raise ValueError(f"op must be one of multiply, divide, add, subtract, scale, reciprocal, got: {op}")


def cumulative_integral(f: SampledFunction, method: str = "spline") -> SampledFunction:
    """
    F(x_i) = integral of f from x0 to x_i at every node.

    The default scheme interpolates real and imaginary parts with a not-a-knot
    cubic spline and sums the exact segment integrals; cubics are reproduced
    exactly. ``method="simpson"`` uses composite Simpson sums instead.
    F(x0) is exactly zero.
    """
    grid = f.grid
    if method == "spline":
        spline = CubicSpline(grid.nodes, _split(f.values), bc_type="not-a-knot", axis=0)
        c = spline.c  # (4, m, 2), local powers of (x - x_i)
        h = grid.h
        segments = c[0] * h**4 / 4 + c[1] * h**3 / 3 + c[2] * h**2 / 2 + c[3] * h
        F = np.zeros((grid.m + 1, 2))
        np.cumsum(segments, axis=0, out=F[1:])
    elif method == "simpson":
        F = cumulative_simpson(_split(f.values), dx=grid.h, axis=0, initial=0.0)
    else:
        raise ValueError(f"method must be one of {QUADRATURES}, got: {method}")
    F = F - F[grid.x0_index]
    return SampledFunction(grid, F[:, 0] + 1j * F[:, 1])
