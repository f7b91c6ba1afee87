"""
Particular solutions and SPPS solution pairs of (p u')' + q u = lambda r u.

Given a nonvanishing solution u0 of the equation at lambda = lambda_center,

    u1 = u0 * sum_k z^k Xtilde(2k),      u2 = u0 * sum_k z^k X(2k+1),   z = lambda - lambda_center

with the families built from the weights (u0^2 r, 1/(u0^2 p)).  Derivatives
come from the series as well:

    u1' = (u0'/u0) u1 + 1/(u0 p) * sum_{k>=1} z^k Xtilde(2k-1)
    u2' = (u0'/u0) u2 + 1/(u0 p) * sum_{k>=0} z^k X(2k)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spps.core.formal_powers import (
    FamilyKind,
    FormalPowerFamily,
    Parity,
    SeriesValue,
    WeightPair,
    boundary_coefficients,
    build_family,
    evaluate_series,
)
from spps.core.grid import MIN_SUBINTERVALS, Grid, SampledFunction
from spps.exceptions import (
    ComplexCoefficientsUnsupportedError,
    DivisionByZeroError,
    GridMismatchError,
    NonconvergentTailError,
    VanishingSolutionError,
)
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

DEFAULT_N = 120
NODELESS_RATIO = 1e-6
REAL_TOLERANCE = 1e-12
CONTINUATION_PHASE = 2.0
SEGMENT_ORDER = 41
CANCELLATION_LIMIT = 1e8


@dataclass(frozen=True)
class SLCoefficients:
    """Coefficients p, q, r sampled on one grid."""

    p: SampledFunction
    q: SampledFunction
    r: SampledFunction

    def __post_init__(self):
        if not (self.p.grid == self.q.grid == self.r.grid):
            raise GridMismatchError("p, q and r must be sampled on the same grid")
        zeros = np.flatnonzero(self.p.values == 0)
        if zeros.size:
            raise DivisionByZeroError(
                f"p vanishes at node {zeros[0]}", node_index=int(zeros[0])
            )

    @property
    def grid(self) -> Grid:
        return self.p.grid

    def shifted(self, center: complex) -> SLCoefficients:
        """Coefficients of (p u')' + (q - center r) u = (lambda - center) r u."""
        if center == 0:
            return self
        return SLCoefficients(self.p, self.q - center * self.r, self.r)

    def is_real(self, tolerance: float = REAL_TOLERANCE) -> bool:
        return all(
            np.max(np.abs(f.imag)) <= tolerance * max(1.0, f.max_abs()) for f in (self.p, self.q)
        )


@dataclass(frozen=True)
class HomogeneousPair:
    """Solutions v1, v2 of (p v')' + (q - center r) v = 0 with derivatives."""

    v1: SampledFunction
    v1_prime: SampledFunction
    v2: SampledFunction
    v2_prime: SampledFunction
    center: complex
    tail: float


@dataclass(frozen=True)
class ParticularSolution:
    """A nonvanishing solution u0 at lambda_center together with u0'."""

    u0: SampledFunction
    u0_prime: SampledFunction
    lambda_center: complex = 0.0

    @property
    def grid(self) -> Grid:
        return self.u0.grid

    def nodeless_ratio(self) -> float:
        return self.u0.min_abs() / self.u0.max_abs()


@dataclass(frozen=True)
class SolutionProfile:
    """Values and derivatives of a solution (whole profile or at one node)."""

    value: np.ndarray | complex
    derivative: np.ndarray | complex
    tail: float


@dataclass(frozen=True, eq=False)
class SppsSolutionPair:
    """u0 plus the Xtilde/X families of one expansion center."""

    coeffs: SLCoefficients
    particular: ParticularSolution
    xtilde: FormalPowerFamily
    x: FormalPowerFamily

    @property
    def center(self) -> complex:
        return self.particular.lambda_center

    @property
    def grid(self) -> Grid:
        return self.coeffs.grid

    @property
    def N(self) -> int:
        return (self.x.order - 1) // 2

    def evaluate(self, which: str, lam: complex, at: int | None = None) -> SolutionProfile:
        """u1 or u2 and its derivative at ``lam``; ``at=None`` gives whole profiles."""
        z = lam - self.center
        u0 = self.particular.u0.values
        u0p = self.particular.u0_prime.values
        p = self.coeffs.p.values
        if at is not None:
            u0, u0p, p = u0[at], u0p[at], p[at]
        if which == "u1":
            body = evaluate_series(self.xtilde, Parity.EVEN, 0, z, at)
            # sum_{k>=1} z^k Xtilde(2k-1) = z * sum_{j>=0} z^j Xtilde(2j+1)
            slope = evaluate_series(self.xtilde, Parity.ODD, 1, z, at)
            slope_value = z * slope.value
        elif which == "u2":
            body = evaluate_series(self.x, Parity.ODD, 1, z, at)
            slope = evaluate_series(self.x, Parity.EVEN, 0, z, at)
            slope_value = slope.value
        else:
            raise ValueError(f"which must be one of {{'u1', 'u2'}}, got: {which}")
        value = u0 * body.value
        derivative = (u0p / u0) * value + slope_value / (u0 * p)
        return SolutionProfile(value=value, derivative=derivative, tail=body.tail)

    def _initial_weights(self, value: complex, slope: complex) -> tuple[complex, complex]:
        """c1, c2 with c1 u1 + c2 u2 taking ``value`` and ``slope`` at x0."""
        i0 = self.grid.x0_index
        u0 = self.particular.u0.at(i0)
        u0p = self.particular.u0_prime.at(i0)
        p0 = self.coeffs.p.at(i0)
        c1 = value / u0
        c2 = (slope - c1 * u0p) * u0 * p0
        return c1, c2

    def initial_value_solution(
        self, lam: complex, value: complex, slope: complex, at: int | None = None
    ) -> SolutionProfile:
        """Solution with u(x0) = value, u'(x0) = slope as c1 u1 + c2 u2."""
        c1, c2 = self._initial_weights(value, slope)
        first = self.evaluate("u1", lam, at)
        second = self.evaluate("u2", lam, at)
        return SolutionProfile(
            value=c1 * first.value + c2 * second.value,
            derivative=c1 * first.derivative + c2 * second.derivative,
            tail=max(abs(c1) * first.tail, abs(c2) * second.tail),
        )

    def taylor_coefficients(self, which: str, at: int) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients of (lambda - center)^k, k = 0..N, in u(x_at) and u'(x_at)."""
        count = self.N + 1
        u0 = self.particular.u0.at(at)
        u0p = self.particular.u0_prime.at(at)
        up = u0 * self.coeffs.p.at(at)
        if which == "u1":
            body = boundary_coefficients(self.xtilde, Parity.EVEN, 0, at, count)
            odd = boundary_coefficients(self.xtilde, Parity.ODD, 1, at, count)
            slope = np.concatenate([[0.0], odd[:-1]])
        elif which == "u2":
            body = boundary_coefficients(self.x, Parity.ODD, 1, at, count)
            slope = boundary_coefficients(self.x, Parity.EVEN, 0, at, count)
        else:
            raise ValueError(f"which must be one of {{'u1', 'u2'}}, got: {which}")
        return u0 * body, u0p * body + slope / up

    def initial_value_coefficients(
        self, value: complex, slope: complex, at: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Taylor coefficients of u(x_at), u'(x_at) for the solution of initial_value_solution."""
        c1, c2 = self._initial_weights(value, slope)
        v1, s1 = self.taylor_coefficients("u1", at)
        v2, s2 = self.taylor_coefficients("u2", at)
        return c1 * v1 + c2 * v2, c1 * s1 + c2 * s2

    def wronskian(self, lam: complex) -> np.ndarray:
        """p (u1 u2' - u1' u2) over the grid (constant for exact solutions)."""
        first = self.evaluate("u1", lam)
        second = self.evaluate("u2", lam)
        return self.coeffs.p.values * (
            first.value * second.derivative - first.derivative * second.value
        )


def _series_tail_check(series: SeriesValue, tolerance: float, what: str) -> None:
    scale = float(np.max(np.abs(series.value)))
    if series.tail > tolerance * max(scale, 1.0):
        raise NonconvergentTailError(
            f"{what}: last series term {series.tail:.3e} exceeds {tolerance:g} of scale {scale:.3e}; "
            "increase N"
        )
    if series.cancellation() > CANCELLATION_LIMIT:
        raise NonconvergentTailError(
            f"{what}: terms up to {series.peak:.3e} cancel down to {scale:.3e}; "
            "refine the grid so the series can be summed piecewise"
        )


def continuation_breaks(coeffs: SLCoefficients, center: complex = 0.0) -> np.ndarray:
    """
    Node indices cutting the grid into pieces of phase at most CONTINUATION_PHASE.

    The phase sqrt(max|q - center r| max|1/p|) L bounds the growth of the Y/Ytilde
    terms on a piece of length L. Every piece keeps at least 2 * MIN_SUBINTERVALS
    subintervals.
    """
    grid = coeffs.grid
    shifted = coeffs.shifted(center)
    phase = math.sqrt(shifted.q.max_abs() * (1.0 / shifted.p).max_abs()) * grid.length
    count = min(math.ceil(phase / CONTINUATION_PHASE), grid.m // (2 * MIN_SUBINTERVALS))
    count = max(count, 1)
    return np.unique(np.linspace(0, grid.m, count + 1).round().astype(int))


def _local_pair(
    weights: WeightPair, order: int, tail_tolerance: float, quadrature: str
) -> tuple[np.ndarray, float]:
    """Rows v1, p v1', v2, p v2' of the pair normalized at the anchor of ``weights.grid``."""
    ytilde = build_family(FamilyKind.YTILDE, weights, order, quadrature=quadrature)
    y = build_family(FamilyKind.Y, weights, order, quadrature=quadrature)
    v1 = evaluate_series(ytilde, Parity.EVEN, 0, 1.0)
    v2 = evaluate_series(y, Parity.ODD, 1, 1.0)
    # Ytilde(2k)' = Ytilde(2k-1)/p and Y(2k+1)' = Y(2k)/p
    flux1 = evaluate_series(ytilde, Parity.ODD, 1, 1.0)
    flux2 = evaluate_series(y, Parity.EVEN, 0, 1.0)
    _series_tail_check(v1, tail_tolerance, "v1")
    _series_tail_check(v2, tail_tolerance, "v2")
    rows = np.array([v1.value, flux1.value, v2.value, flux2.value])
    return rows, max(v1.tail, v2.tail)


def homogeneous_pair(
    coeffs: SLCoefficients,
    N: int = DEFAULT_N,
    center: complex = 0.0,
    tail_tolerance: float = 1e-12,
    quadrature: str = "spline",
) -> HomogeneousPair:
    """
    Two solutions of (p v')' + (q - center r) v = 0 from the Y/Ytilde families.

    v1 = sum Ytilde(2k), v2 = sum Y(2k+1) with weights (-(q - center r), 1/p), so that
    v1(x0) = 1, v1'(x0) = 0, v2(x0) = 0, v2'(x0) = 1/p(x0).

    On grids whose phase exceeds CONTINUATION_PHASE the series are summed piece by
    piece. Each piece gets its own pair, anchored at its node nearest x0, and the
    values (v, p v') at that node carry both solutions across.

    Raises:
        NonconvergentTailError: If the last term is not negligible or the terms cancel
    """
    shifted = coeffs.shifted(center)
    inv_p = 1.0 / shifted.p
    minus_q = -shifted.q
    grid = coeffs.grid
    breaks = continuation_breaks(coeffs, center)
    pieces = breaks.size - 1
    order = 2 * N + 1 if pieces == 1 else min(2 * N + 1, SEGMENT_ORDER)
    # rows v1, p v1', v2, p v2'
    state = np.zeros((4, grid.m + 1), dtype=complex)

    def run(piece: int, anchor: int, start: np.ndarray) -> float:
        lo, hi = int(breaks[piece]), int(breaks[piece + 1])
        sub = Grid(
            a=float(grid.nodes[lo]), b=float(grid.nodes[hi]), m=hi - lo, x0_index=anchor - lo
        )
        weights = WeightPair(
            w_odd=SampledFunction(sub, minus_q.values[lo : hi + 1]),
            w_even=SampledFunction(sub, inv_p.values[lo : hi + 1]),
        )
        local, piece_tail = _local_pair(weights, order, tail_tolerance, quadrature)
        for j, (value, flux) in enumerate(start):
            state[2 * j, lo : hi + 1] = value * local[0] + flux * local[2]
            state[2 * j + 1, lo : hi + 1] = value * local[1] + flux * local[3]
        return piece_tail

    i0 = grid.x0_index
    home = min(int(np.searchsorted(breaks, i0, side="right")) - 1, pieces - 1)
    tail = run(home, i0, np.eye(2, dtype=complex))
    for piece in range(home + 1, pieces):
        node = int(breaks[piece])
        tail = max(tail, run(piece, node, state[:, node].reshape(2, 2).copy()))
    for piece in range(home - 1, -1, -1):
        node = int(breaks[piece + 1])
        tail = max(tail, run(piece, node, state[:, node].reshape(2, 2).copy()))

    logger.debug(f"Homogeneous pair at center {center}: {pieces} piece(s), tail {tail:.3e}")
    return HomogeneousPair(
        v1=SampledFunction(grid, state[0]),
        v1_prime=SampledFunction(grid, state[1] * inv_p.values),
        v2=SampledFunction(grid, state[2]),
        v2_prime=SampledFunction(grid, state[3] * inv_p.values),
        center=center,
        tail=tail,
    )


def _combine(pair: HomogeneousPair, scale: complex) -> ParticularSolution:
    return ParticularSolution(
        u0=pair.v1 + 1j * scale * pair.v2,
        u0_prime=pair.v1_prime + 1j * scale * pair.v2_prime,
        lambda_center=pair.center,
    )


def _verify_nodeless(
    particular: ParticularSolution, pair: HomogeneousPair, scale: complex
) -> ParticularSolution:
    """
    Compare |u0| with the local size |v1| + s |v2| of the pair at every node,
    s = max(|c|, |p(x0)|).
    """
    grid = particular.grid
    weight = max(abs(scale), abs(pair.v2_prime.at(grid.x0_index)) ** -1)
    magnitudes = np.abs(particular.u0.values)
    local = np.abs(pair.v1.values) + weight * np.abs(pair.v2.values)
    ratio = magnitudes / np.maximum(local, np.finfo(float).tiny)
    worst = int(np.argmin(ratio))
    if ratio[worst] <= NODELESS_RATIO:
        raise VanishingSolutionError(
            f"Particular solution nearly vanishes at node {worst} "
            f"(|u0| = {magnitudes[worst]:.3e}, local scale {local[worst]:.3e})",
            node_index=worst,
        )
    return particular


def nonvanishing_u0(
    coeffs: SLCoefficients,
    N: int = DEFAULT_N,
    center: float = 0.0,
    scale: complex | None = None,
    tail_tolerance: float = 1e-12,
    quadrature: str = "spline",
) -> ParticularSolution:
    """
    u0 = v1 + i c v2 for real coefficients, nonvanishing by Sturm separation.

    The default c = p(x0) gives u0(x0) = 1 and u0'(x0) = i.

    Raises:
        ComplexCoefficientsUnsupportedError: If p or q (or the center) is complex
        VanishingSolutionError: If |u0| nearly vanishes at a node
    """
    if not coeffs.is_real() or np.imag(center) != 0:
        raise ComplexCoefficientsUnsupportedError(
            "The v1 + i v2 construction needs real p, q and a real center; "
            "supply a nonvanishing particular solution instead"
        )
    pair = homogeneous_pair(coeffs, N, center, tail_tolerance, quadrature)
    if scale is None:
        scale = coeffs.p.at(coeffs.grid.x0_index).real
    return _verify_nodeless(_combine(pair, scale), pair, scale)


def balanced_u0(
    coeffs: SLCoefficients,
    N: int = DEFAULT_N,
    center: float = 0.0,
    tail_tolerance: float = 1e-12,
    quadrature: str = "spline",
) -> ParticularSolution:
    """
    Nonvanishing u0 = v1 + i c v2 with |u0| as flat as the candidates allow.

    c starts from ||v1|| / ||v2|| (which makes u0 = exp(i w x) for constant
    coefficients) and the candidate with the smallest max|u0| / min|u0| wins.

    Raises:
        VanishingSolutionError: If every candidate nearly vanishes
    """
    if not coeffs.is_real() or np.imag(center) != 0:
        raise ComplexCoefficientsUnsupportedError(
            "Balanced particular solutions need real coefficients and a real center"
        )
    pair = homogeneous_pair(coeffs, N, center, tail_tolerance, quadrature)
    norm2 = np.linalg.norm(pair.v2.values)
    base = np.linalg.norm(pair.v1.values) / norm2 if norm2 > 0 else 1.0
    best, best_scale, best_spread = None, base, np.inf
    for factor in (1.0, 0.5, 2.0, 0.25, 4.0):
        candidate = _combine(pair, base * factor)
        spread = candidate.u0.max_abs() / max(candidate.u0.min_abs(), np.finfo(float).tiny)
        if spread < best_spread:
            best, best_scale, best_spread = candidate, base * factor, spread
    logger.debug(f"Balanced u0 at center {center}: max/min |u0| = {best_spread:.3e}")
    return _verify_nodeless(best, pair, best_scale)


def build_solution_pair(
    coeffs: SLCoefficients,
    particular: ParticularSolution,
    N: int = DEFAULT_N,
    quadrature: str = "spline",
) -> SppsSolutionPair:
    """
    Families Xtilde, X of order 2N+1 for the expansion at particular.lambda_center.

    The weights u0^2 r and 1/(u0^2 p) do not involve q; recentring enters only
    through u0, which must solve the equation at the center.
    """
    if particular.grid != coeffs.grid:
        raise GridMismatchError("Particular solution and coefficients use different grids")
    u0_sq = particular.u0 * particular.u0
    weights = WeightPair(w_odd=u0_sq * coeffs.r, w_even=1.0 / (u0_sq * coeffs.p))
    xtilde = build_family(FamilyKind.XTILDE, weights, 2 * N + 1, quadrature=quadrature)
    x = build_family(FamilyKind.X, weights, 2 * N + 1, quadrature=quadrature)
    logger.debug(f"Built SPPS pair of order {2 * N + 1} at center {particular.lambda_center}")
    return SppsSolutionPair(coeffs=coeffs, particular=particular, xtilde=xtilde, x=x)


