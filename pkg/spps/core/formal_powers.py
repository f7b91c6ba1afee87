"""
Recursive formal powers.

A family is built from a pair of alternating weights (w_odd, w_even):

    member[0] = 1
    member[n] = integral from x0 of member[n-1] * weight(n)

"Tilde" kinds (Xtilde, Ytilde) use w_odd at odd n and w_even at even n;
plain kinds (X, Y) use the opposite parity.  Passing the same WeightPair to
both kinds therefore yields the two companion families of one expansion,
e.g. (u0^2 r, 1/(u0^2 p)) for X/Xtilde and (-q, 1/p) for Y/Ytilde.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from spps.core.grid import Grid, SampledFunction, cumulative_integral
from spps.exceptions import GridMismatchError, InsufficientOrderError
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)


class FamilyKind(str, Enum):
    """Kinds of formal power families."""

    X = "X"
    XTILDE = "Xtilde"
    Y = "Y"
    YTILDE = "Ytilde"

    @property
    def starts_with_odd_weight(self) -> bool:
        return self in (FamilyKind.XTILDE, FamilyKind.YTILDE)


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class WeightPair:
    """The two alternating integrand weights of a family."""

    w_odd: SampledFunction
    w_even: SampledFunction

    def __post_init__(self):
        if self.w_odd.grid != self.w_even.grid:
            raise GridMismatchError("Weights of a pair must share one grid")

    @property
    def grid(self) -> Grid:
        return self.w_odd.grid


@dataclass(frozen=True)
class SeriesValue:
    """A summed series with the magnitudes of its last and of its largest term."""

    value: complex | np.ndarray
    tail: float
    peak: float = 0.0

    def cancellation(self) -> float:
        """Largest term over the largest |sum| (at most 1 when nothing cancels)."""
        scale = float(np.max(np.abs(self.value)))
        if self.peak == 0.0:
            return 1.0
        return self.peak / max(scale, np.finfo(float).tiny)


@dataclass(frozen=True, eq=False)
class FormalPowerFamily:
    """Members 0..order of one family, stored as an (order+1, m+1) array."""

    kind: FamilyKind
    weights: WeightPair
    table: np.ndarray
    quadrature: str = "spline"

    @property
    def order(self) -> int:
        return self.table.shape[0] - 1

    @property
    def grid(self) -> Grid:
        return self.weights.grid

    @property
    def parity_convention(self) -> str:
        """Which weight the first integration (n=1) uses."""
        return "w_odd" if self.kind.starts_with_odd_weight else "w_even"

    @property
    def members(self) -> tuple[SampledFunction, ...]:
        return tuple(SampledFunction(self.grid, row) for row in self.table)

    def member(self, n: int) -> SampledFunction:
        self._require(n)
        return SampledFunction(self.grid, self.table[n])

    def weight(self, n: int) -> SampledFunction:
        """Weight multiplying member[n-1] inside the n-th integral."""
        odd_step = n % 2 == 1
        if not self.kind.starts_with_odd_weight:
            odd_step = not odd_step
        return self.weights.w_odd if odd_step else self.weights.w_even

    def derivative(self, n: int) -> SampledFunction:
        """Exact derivative of member[n]: member[n-1] * weight(n) (zero for n = 0)."""
        self._require(n)
        if n == 0:
            return SampledFunction.constant(self.grid, 0.0)
        return SampledFunction(self.grid, self.table[n - 1] * self.weight(n).values)

    def _require(self, n: int) -> None:
        if n < 0 or n > self.order:
            raise InsufficientOrderError(
                f"{self.kind.value} family has order {self.order}; member {n} requested"
            )


def build_family(
    kind: FamilyKind | str,
    weights: WeightPair,
    N: int,
    grid: Grid | None = None,
    quadrature: str = "spline",
) -> FormalPowerFamily:
    """
    Build members 0..N of a formal power family.

    Args:
        kind: Family kind (controls which weight starts the alternation)
        weights: Alternating weights
        N: Highest member index (N >= 1)
        grid: Optional grid the caller expects; must match the weights
        quadrature: Cumulative quadrature scheme

    Raises:
        GridMismatchError: If ``grid`` differs from the weights' grid
    """
    kind = FamilyKind(kind)
    if N < 1:
        raise ValueError(f"N must be >= 1, got: {N}")
    if grid is not None and grid != weights.grid:
        raise GridMismatchError("Weights are sampled on a different grid than requested")
    grid = weights.grid

    table = np.empty((N + 1, grid.m + 1), dtype=complex)
    table[0] = 1.0
    family = FormalPowerFamily(kind=kind, weights=weights, table=table, quadrature=quadrature)
    for n in range(1, N + 1):
        integrand = SampledFunction(grid, table[n - 1] * family.weight(n).values)
        table[n] = cumulative_integral(integrand, method=quadrature).values
    table.setflags(write=False)
    logger.debug(
        f"Built {kind.value} family to order {N} on {grid.m + 1} nodes "
        f"(max|last member| = {np.max(np.abs(table[N])):.3e})"
    )
    return family


def kahan_sum(rows: np.ndarray, z: complex) -> SeriesValue:
    """
    Compensated sum of z^k * rows[k] over k (ascending).

    ``rows`` may be 1-D (boundary values) or 2-D (profiles, one row per k).
    """
    rows = np.asarray(rows, dtype=complex)
    total = np.zeros(rows.shape[1:], dtype=complex)
    compensation = np.zeros_like(total)
    power = 1.0 + 0.0j
    term = total
    peak = 0.0
    for row in rows:
        term = power * row
        peak = max(peak, float(np.max(np.abs(term))))
        y = term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        power *= z
    tail = float(np.max(np.abs(term))) if rows.shape[0] else 0.0
    return SeriesValue(value=total if total.ndim else complex(total), tail=tail, peak=peak)


def series_indices(family: FormalPowerFamily, parity: Parity | str, offset: int) -> range:
    """Member indices of the requested parity starting at the first one >= offset."""
    parity = Parity(parity)
    start = max(offset, 0)
    wanted = 0 if parity is Parity.EVEN else 1
    if start % 2 != wanted:
        start += 1
    indices = range(start, family.order + 1, 2)
    if len(indices) == 0:
        raise InsufficientOrderError(
            f"No {parity.value} members >= {offset} in a family of order {family.order}"
        )
    return indices


def evaluate_series(
    family: FormalPowerFamily,
    parity: Parity | str,
    offset: int,
    z: complex,
    at: int | None = None,
) -> SeriesValue:
    """
    Sum z^k * member[i_k](at) over the parity subsequence i_0 < i_1 < ...

    ``i_0`` is the smallest index of the given parity that is >= ``offset``.
    With ``at=None`` the whole profile is returned as an array.

    Raises:
        InsufficientOrderError: If the subsequence is empty
    """
    indices = series_indices(family, parity, offset)
    rows = family.table[indices.start :: 2]
    if at is not None:
        rows = rows[:, at]
    return kahan_sum(rows, z)


def boundary_coefficients(
    family: FormalPowerFamily, parity: Parity | str, offset: int, at: int, count: int
) -> np.ndarray:
    """member[i_k](at) for k = 0..count-1 along a parity subsequence (zero-padded)."""
    indices = series_indices(family, parity, offset)
    values = np.zeros(count, dtype=complex)
    available = family.table[indices.start :: 2, at][:count]
    values[: available.size] = available
    return values


def growth_bound(family: FormalPowerFamily, n: int) -> float:
    """
    Majorant of max|member[n]| from the convergence estimate.

    For even n = 2k: (max|w_odd| * max|w_even|)^k * L^(2k) / (2k)!; odd n gain one
    more factor of the starting weight bound and of L.
    """
    L = family.grid.length
    a = family.weights.w_odd.max_abs()
    b = family.weights.w_even.max_abs()
    k, odd = divmod(n, 2)
    first = a if family.kind.starts_with_odd_weight else b
    bound = (a * b) ** k * L ** (2 * k)
    if odd:
        bound *= first * L
    return bound / math.factorial(n)


def suggest_order(
    family: FormalPowerFamily, radius: float, parity: Parity | str = Parity.EVEN, tol: float = 1e-16
) -> int:
    """
    Smallest k with max|member[i_k]| * radius^k < tol * (running sum scale).

    Returns the family's available count if no such k exists.
    """
    indices = series_indices(family, parity, 0)
    magnitudes = np.max(np.abs(family.table[indices.start :: 2]), axis=1)
    terms = magnitudes * radius ** np.arange(magnitudes.size)
    scale = np.cumsum(terms)
    below = np.flatnonzero(terms[1:] < tol * scale[:-1])
    if below.size == 0:
        logger.warning(
            f"Tail of the {family.kind.value} series stays above {tol:g} at radius {radius:g}"
        )
        return magnitudes.size
    return int(below[0]) + 1
