"""
Hill's equation -(p f')' + q f = lambda f with T-periodic p > 0 and q.

The periodic problem is handled as the Sturm-Liouville problem
(p u')' - q u = lambda (-1) u on one period, so every SPPS building block of
``spps_core`` applies unchanged.  For a nonvanishing solution f* at lambda*
the fundamental system f1, f2 (f1(0)=1, f1'(0)=0, f2(0)=0, f2'(0)=1) is a
power series in lambda - lambda*, and so is the discriminant

    D(lambda) = f1(T, lambda) + f2'(T, lambda).

With the nodeless periodic solution f0 at the lowest periodic eigenvalue the
coefficients collapse to a_n = Xtilde(2n)(T) + X(2n)(T) and a_0 = 2.
Band edges are the roots of D - 2 (periodic) and D + 2 (antiperiodic).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from spps.config.models import NumericsConfig, RootFindConfig
from spps.core.grid import SampledFunction, make_grid, sample
from spps.core.models import Root, RootConstraint
from spps.core.rootfind import (
    CharacteristicSeries,
    locate_roots,
    real_roots_in_interval,
)
from spps.core.spps_core import (
    ParticularSolution,
    SLCoefficients,
    SolutionProfile,
    SppsSolutionPair,
    balanced_u0,
    build_solution_pair,
    homogeneous_pair,
)
from spps.exceptions import (
    DegenerateMatchingError,
    NoRootInBracketError,
    NotNodelessError,
    QuadraticDegenerateError,
    SPPSError,
)
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

NODELESS_RATIO = 1e-6
PERIODICITY_TOL = 1e-6
CLUSTER_GAP = 1e-2
DOUBLE_ROOT_SLOPE = 1e-4
SEED_TOL = 1e-6


@dataclass(frozen=True)
class PeriodicProblem:
    """p and q sampled over one period [0, T]."""

    p: SampledFunction
    q: SampledFunction

    def __post_init__(self):
        if self.p.grid != self.q.grid:
            raise ValueError("p and q must share one grid")
        if self.grid.a != 0.0 or self.grid.x0_index != 0:
            raise ValueError("A periodic problem is sampled on [0, T] anchored at 0")
        if np.any(self.p.real <= 0) or np.max(np.abs(self.p.imag)) > 0:
            raise ValueError("p must be real and positive at every node")
        if np.max(np.abs(self.q.imag)) > 0:
            raise ValueError("q must be real")

    @classmethod
    def from_functions(cls, q, period: float, m: int = 2000, p=1.0) -> PeriodicProblem:
        grid = make_grid(0.0, period, m)
        return cls(p=sample(grid, p), q=sample(grid, q))

    @property
    def grid(self):
        return self.p.grid

    @property
    def period(self) -> float:
        return self.grid.length

    @property
    def sl_coefficients(self) -> SLCoefficients:
        """(p u')' - q u = lambda (-1) u."""
        return SLCoefficients(p=self.p, q=-self.q, r=SampledFunction.constant(self.grid, -1.0))

    def mean_q(self) -> float:
        return float(self.q.integral().at(self.grid.m).real / self.period)


class DiscriminantSource(str, Enum):
    PERIODIC_F0 = "periodic_f0"
    GENERAL_FSTAR = "general_fstar"


@dataclass(frozen=True)
class FundamentalSolutions:
    """f1, f2 and derivatives over one period at a fixed lambda."""

    lam: complex
    f1: SampledFunction
    f1_prime: SampledFunction
    f2: SampledFunction
    f2_prime: SampledFunction

    def monodromy(self) -> np.ndarray:
        end = self.f1.grid.m
        return np.array(
            [
                [self.f1.at(end), self.f2.at(end)],
                [self.f1_prime.at(end), self.f2_prime.at(end)],
            ]
        )

    @property
    def discriminant(self) -> complex:
        return complex(np.trace(self.monodromy()))

    def wronskian(self) -> np.ndarray:
        return (self.f1 * self.f2_prime - self.f1_prime * self.f2).values


@dataclass(frozen=True, eq=False)
class DiscriminantSeries:
    """D and the monodromy entries as power series around one center."""

    series: CharacteristicSeries
    monodromy: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    source: DiscriminantSource
    basis: SppsSolutionPair

    @property
    def center(self) -> complex:
        return self.series.center

    @property
    def coeffs(self) -> np.ndarray:
        return self.series.coeffs

    def evaluate(self, lam):
        return self.series.evaluate(lam)

    def monodromy_at(self, lam: complex) -> np.ndarray:
        """[[f1(T), f2(T)], [f1'(T), f2'(T)]] at ``lam`` from the series."""
        z = lam - self.center
        entries = [np.polynomial.polynomial.polyval(z, c) for c in self.monodromy]
        return np.array(entries, dtype=complex).reshape(2, 2)


@dataclass(frozen=True)
class BandEdge:
    index: int
    value: float
    kind: str
    error_estimate: float


@dataclass
class BandEdges:
    """Sorted band edges with their periodic/antiperiodic classification."""

    edges: list[BandEdge] = field(default_factory=list)
    interlaced: bool = True

    @property
    def periodic(self) -> list[float]:
        return [e.value for e in self.edges if e.kind == "periodic"]

    @property
    def antiperiodic(self) -> list[float]:
        return [e.value for e in self.edges if e.kind == "antiperiodic"]

    @property
    def values(self) -> list[float]:
        return [e.value for e in self.edges]


@dataclass(frozen=True)
class BlochSolution:
    """Floquet multipliers and self-matching solutions F+- at one lambda."""

    lam: complex
    beta_plus: complex
    beta_minus: complex
    alpha_plus: complex | None
    alpha_minus: complex | None
    F_plus: SampledFunction
    F_minus: SampledFunction
    degenerate: bool = False

    def extend(self, which: str, n_cells: int) -> tuple[np.ndarray, np.ndarray]:
        """F(x) on [0, n_cells T] from F(x + nT) = beta^n F(x)."""
        if which == "plus":
            beta, F = self.beta_plus, self.F_plus
        elif which == "minus":
            beta, F = self.beta_minus, self.F_minus
        else:
            raise ValueError(f"which must be one of {{'plus', 'minus'}}, got: {which}")
        grid = F.grid
        xs, values = [], []
        for n in range(n_cells):
            nodes = grid.nodes if n == 0 else grid.nodes[1:]
            cell = F.values if n == 0 else F.values[1:]
            xs.append(nodes + n * grid.length)
            values.append(beta**n * cell)
        return np.concatenate(xs), np.concatenate(values)


@dataclass
class HillResult:
    lambda0: float
    f0: ParticularSolution
    discriminant: DiscriminantSeries
    edges: BandEdges


def fundamental_at_lambda0(
    problem: PeriodicProblem, lambda0: float, N: int = 120, numerics: NumericsConfig | None = None
) -> FundamentalSolutions:
    """f0,1 = sum Ytilde(2k), f0,2 = p(0) sum Y(2k+1) of -(p f')' + (q - lambda0) f = 0."""
    numerics = numerics or NumericsConfig()
    pair = homogeneous_pair(
        problem.sl_coefficients,
        N,
        center=lambda0,
        tail_tolerance=numerics.tail_tolerance,
        quadrature=numerics.quadrature,
    )
    p0 = problem.p.at(0).real
    return FundamentalSolutions(
        lam=lambda0,
        f1=pair.v1,
        f1_prime=pair.v1_prime,
        f2=p0 * pair.v2,
        f2_prime=p0 * pair.v2_prime,
    )


def discriminant_series(
    problem: PeriodicProblem,
    f0: ParticularSolution,
    N: int = 120,
    source: DiscriminantSource | str | None = None,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> DiscriminantSeries:
    """
    D(lambda) around f0.lambda_center.

    For any nonvanishing f* at lambda* the coefficients are
    (f*(T)/f*(0)) Xtilde(2n)(T) + (f*(0)/f*(T)) X(2n)(T)
    + p(0) (f*(0) f*'(T) - f*'(0) f*(T)) X(2n+1)(T),
    which reduces to Xtilde(2n)(T) + X(2n)(T) for a periodic f0.
    """
    settings = settings or RootFindConfig()
    numerics = numerics or NumericsConfig()
    if source is None:
        periodic = (
            abs(f0.u0.at(problem.grid.m) - f0.u0.at(0)) <= PERIODICITY_TOL * f0.u0.max_abs()
        )
        source = DiscriminantSource.PERIODIC_F0 if periodic else DiscriminantSource.GENERAL_FSTAR
    source = DiscriminantSource(source)

    basis = build_solution_pair(problem.sl_coefficients, f0, N, quadrature=numerics.quadrature)
    end = problem.grid.m
    f1_value, f1_slope = basis.initial_value_coefficients(1.0, 0.0, end)
    f2_value, f2_slope = basis.initial_value_coefficients(0.0, 1.0, end)
    coeffs = f1_value + f2_slope
    series = CharacteristicSeries.from_coefficients(
        f0.lambda_center, coeffs, tail_ratio=settings.trust_tail_ratio
    )
    if source is DiscriminantSource.PERIODIC_F0 and abs(coeffs[0] - 2.0) > 1e-6:
        logger.warning(f"Discriminant at the periodic center is {coeffs[0]:.12g}, expected 2")
    logger.debug(
        f"Discriminant series ({source.value}) at {f0.lambda_center:.12g}: "
        f"trust radius {series.trust_radius:.3g}"
    )
    return DiscriminantSeries(
        series=series,
        monodromy=(f1_value, f2_value, f1_slope, f2_slope),
        source=source,
        basis=basis,
    )


def general_discriminant(
    problem: PeriodicProblem,
    center: float,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> DiscriminantSeries:
    """Discriminant series around an arbitrary real center with a balanced f*."""
    numerics = numerics or NumericsConfig()
    fstar = balanced_u0(
        problem.sl_coefficients,
        N,
        center=center,
        tail_tolerance=numerics.tail_tolerance,
        quadrature=numerics.quadrature,
    )
    return discriminant_series(
        problem, fstar, N, DiscriminantSource.GENERAL_FSTAR, settings, numerics
    )


def lowest_eigenvalue(
    problem: PeriodicProblem,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> float:
    """
    Smallest root of D - 2 in [min q, mean q] using the series around min q - 1.

    Raises:
        NoRootInBracketError: If D - 2 has no sign change in the bracket
    """
    settings = settings or RootFindConfig()
    q_min = float(np.min(problem.q.real))
    q_mean = problem.mean_q()
    margin = 1e-3 * (1.0 + abs(q_mean - q_min))
    lower, upper = q_min - margin, q_mean + margin

    discriminant = general_discriminant(problem, q_min - 1.0, N, settings, numerics)
    shifted = discriminant.series.plus_constant(-2.0)
    roots = real_roots_in_interval(shifted, lower, upper, settings)
    if not roots:
        raise NoRootInBracketError(
            f"D - 2 has no sign change in [{lower:.6g}, {upper:.6g}]; increase N or m"
        )
    lambda0 = min(r.value.real for r in roots)
    logger.info(f"Lowest periodic eigenvalue lambda0 = {lambda0:.15g}")
    return lambda0


def nodeless_periodic_f0(
    problem: PeriodicProblem,
    lambda0: float,
    N: int = 120,
    numerics: NumericsConfig | None = None,
) -> ParticularSolution:
    """
    f0 = f0,1 + alpha_p f0,2 with alpha_p = (f0,2'(T) - f0,1(T)) / (2 f0,2(T)).

    Raises:
        DegenerateMatchingError: If f0,2(T) vanishes
        NotNodelessError: If f0 has a zero on the period
    """
    fundamental = fundamental_at_lambda0(problem, lambda0, N, numerics)
    end = problem.grid.m
    f02_T = fundamental.f2.at(end)
    if abs(f02_T) <= 1e-14 * max(1.0, fundamental.f2.max_abs()):
        raise DegenerateMatchingError(f"f0,2(T) vanishes at lambda0 = {lambda0}")
    alpha = (fundamental.f2_prime.at(end) - fundamental.f1.at(end)) / (2.0 * f02_T)
    alpha = alpha.real
    f0 = fundamental.f1 + alpha * fundamental.f2
    f0_prime = fundamental.f1_prime + alpha * fundamental.f2_prime

    scale = f0.max_abs()
    drift = max(abs(f0.at(end) - f0.at(0)), abs(f0_prime.at(end) - f0_prime.at(0)))
    if drift > PERIODICITY_TOL * max(scale, f0_prime.max_abs()):
        logger.warning(f"Periodic solution drifts by {drift:.3e} over one period")
    if f0.min_abs() <= NODELESS_RATIO * scale:
        raise NotNodelessError(
            f"Periodic solution at lambda0 = {lambda0} has a zero "
            f"(min |f0| = {f0.min_abs():.3e})"
        )
    return ParticularSolution(u0=f0, u0_prime=f0_prime, lambda_center=lambda0)


def fundamental_system(discriminant: DiscriminantSeries, lam: complex) -> FundamentalSolutions:
    """f1, f2 over one period at ``lam`` from the SPPS basis of the discriminant."""
    basis = discriminant.basis
    first: SolutionProfile = basis.initial_value_solution(lam, 1.0, 0.0)
    second: SolutionProfile = basis.initial_value_solution(lam, 0.0, 1.0)
    grid = basis.grid
    return FundamentalSolutions(
        lam=lam,
        f1=SampledFunction(grid, first.value),
        f1_prime=SampledFunction(grid, first.derivative),
        f2=SampledFunction(grid, second.value),
        f2_prime=SampledFunction(grid, second.derivative),
    )


def _real_candidates(roots: list[Root], tolerance: float) -> list[Root]:
    return [r for r in roots if abs(r.value.imag) <= tolerance * (1.0 + abs(r.value))]


def _relative_slope(series: CharacteristicSeries, lam: complex) -> float:
    """|k'(l)| over the magnitude of the summed derivative terms."""
    derivative = np.polynomial.polynomial.polyder(series.coeffs)
    scale = np.polynomial.polynomial.polyval(abs(lam - series.center), np.abs(derivative))
    if scale == 0:
        return 0.0
    return float(abs(series.derivative(lam)) / scale)


def _copies(series: CharacteristicSeries, root: Root) -> int:
    """Merged companion twins count twice only at a genuine double root."""
    if root.multiplicity > 1 and _relative_slope(series, root.value) <= DOUBLE_ROOT_SLOPE:
        return 2
    return 1


def _edges_from(discriminant: DiscriminantSeries, settings: RootFindConfig) -> list[BandEdge]:
    edges: list[BandEdge] = []
    for kind, offset in (("periodic", -2.0), ("antiperiodic", 2.0)):
        shifted = discriminant.series.plus_constant(offset)
        report = locate_roots(shifted, RootConstraint.none(), settings)
        for root in _real_candidates(report.roots, 1e-3):
            for _ in range(_copies(shifted, root)):
                edges.append(BandEdge(0, root.value.real, kind, root.error_estimate))
    return edges


def _seed_lambda0(edges: list[BandEdge], lambda0: float) -> list[BandEdge]:
    """Put lambda0 first; computed copies of it and anything below it are dropped."""
    tolerance = SEED_TOL * (1.0 + abs(lambda0))
    kept = [
        e
        for e in edges
        if e.value > lambda0 - tolerance
        and not (e.kind == "periodic" and abs(e.value - lambda0) <= tolerance)
    ]
    if len(kept) < len(edges):
        logger.debug(f"Dropped {len(edges) - len(kept)} computed edge(s) at or below lambda0")
    return [BandEdge(0, lambda0, "periodic", 0.0)] + kept


def _extend(
    problem: PeriodicProblem,
    edges: list[BandEdge],
    count: int,
    N: int,
    settings: RootFindConfig,
    numerics: NumericsConfig | None,
    floor: float | None = None,
) -> list[BandEdge]:
    """
    Recentre just above the highest edge until ``count`` edges are known or the
    shifts run out.  Edges within one cluster gap of the top are taken from the
    recentred series; edges at or below ``floor`` are never replaced.
    """
    shifts = 0
    while len(edges) < count and edges and shifts < settings.max_shifts:
        top = edges[-1].value
        gap = CLUSTER_GAP * (1.0 + abs(top))
        window = top - gap
        if floor is not None:
            window = max(window, floor + SEED_TOL * (1.0 + abs(floor)))
        center = top + 0.5 * gap
        try:
            local = general_discriminant(problem, center, N, settings, numerics)
        except SPPSError as e:
            logger.warning(f"Recentring at {center:.10g} failed: {e}")
            break
        shifts += 1
        found = [e for e in _edges_from(local, settings) if e.value > window]
        stale = [e for e in edges if e.value > window]
        if len(found) <= len(stale):
            logger.info(f"No band edges above {top:.10g} after recentring at {center:.10g}")
            break
        edges = sorted([e for e in edges if e.value <= window] + found, key=lambda e: e.value)
        logger.info(f"Recentred at {center:.10g}: {len(found) - len(stale)} more edge(s)")
    return edges


def _clusters(edges: list[BandEdge], settings: RootFindConfig) -> list[list[int]]:
    """Index groups of same-kind neighbours that are close or poorly resolved."""
    groups: list[list[int]] = []
    i = 0
    while i < len(edges):
        group = [i]
        while (
            group[-1] + 1 < len(edges)
            and edges[group[-1] + 1].kind == edges[i].kind
            and edges[group[-1] + 1].value - edges[group[-1]].value
            <= CLUSTER_GAP * (1.0 + abs(edges[i].value))
        ):
            group.append(group[-1] + 1)
        worst = max(edges[j].error_estimate / (1.0 + abs(edges[j].value)) for j in group)
        if len(group) > 1 or worst > settings.accept_tol:
            groups.append(group)
        i = group[-1] + 1
    return groups


def band_edges(
    problem: PeriodicProblem,
    discriminant: DiscriminantSeries,
    count: int = 11,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
    lambda0: float | None = None,
) -> BandEdges:
    """
    The lowest ``count`` real roots of D_N - 2 and D_N + 2.

    lambda0 (the discriminant center for a periodic f0) is seeded as the first
    edge: D - 2 vanishes at the center itself, where the residual test cannot
    resolve it.  Each distinct root gives one edge unless the slope shows a
    genuine double root.  When fewer than ``count`` edges are trusted the
    discriminant is recentred at the highest edge, at most ``max_shifts`` times.
    Clusters of nearly coinciding edges, and edges whose estimated error exceeds
    the acceptance tolerance, are recomputed from a discriminant recentred next
    to the cluster.
    """
    settings = settings or RootFindConfig()
    N = discriminant.basis.N
    if lambda0 is None and discriminant.source is DiscriminantSource.PERIODIC_F0:
        lambda0 = discriminant.center.real
    edges = sorted(_edges_from(discriminant, settings), key=lambda e: e.value)
    if lambda0 is not None:
        edges = _seed_lambda0(edges, lambda0)
    edges = _extend(problem, edges, count, N, settings, numerics, lambda0)[:count]

    for group in _clusters(edges, settings):
        kind = edges[group[0]].kind
        midpoint = float(np.mean([edges[j].value for j in group]))
        center = midpoint + 0.5 * CLUSTER_GAP * (1.0 + abs(midpoint))
        try:
            local = general_discriminant(problem, center, N, settings, numerics)
        except SPPSError as e:
            logger.warning(f"Recentring at {center:.10g} failed: {e}")
            continue
        offset = -2.0 if kind == "periodic" else 2.0
        shifted = local.series.plus_constant(offset)
        report = locate_roots(shifted, RootConstraint.none(), settings)
        nearby = sorted(
            _real_candidates(report.roots, 1e-3),
            key=lambda r: abs(r.value.real - midpoint),
        )
        refined: list[tuple[float, float]] = []
        for root in nearby:
            refined.extend([(root.value.real, root.error_estimate)] * _copies(shifted, root))
        if len(refined) < len(group):
            logger.warning(f"Recentring at {center:.10g} found {len(refined)} of {len(group)} edges")
            continue
        for j, (value, error) in zip(group, sorted(refined[: len(group)])):
            edges[j] = BandEdge(0, value, kind, error)
        logger.info(f"Recentred {len(group)} {kind} edge(s) at {center:.10g}")

    edges = sorted(edges, key=lambda e: e.value)
    edges = [BandEdge(i, e.value, e.kind, e.error_estimate) for i, e in enumerate(edges)]
    result = BandEdges(edges=edges, interlaced=_interlaced(edges))
    if not result.interlaced:
        logger.warning("Computed band edges violate the interlacing order")
    if len(edges) < count:
        logger.warning(f"Only {len(edges)} of {count} band edges lie inside the trusted range")
    return result


def _interlaced(edges: list[BandEdge]) -> bool:
    """lambda0 periodic, then pairs of equal kind alternating antiperiodic/periodic."""
    if not edges:
        return True
    if edges[0].kind != "periodic":
        return False
    for i in range(1, len(edges)):
        expected = "antiperiodic" if ((i + 1) // 2) % 2 == 1 else "periodic"
        if edges[i].kind != expected:
            return False
        if edges[i].value < edges[i - 1].value:
            return False
    return True


def bloch_solutions(discriminant: DiscriminantSeries, lam: complex, edge_tol: float = 1e-10) -> BlochSolution:
    """
    Floquet multipliers beta+- = (D -+ sqrt(D^2 - 4)) / 2 and self-matching F = f1 + alpha f2.

    alpha comes from the eigenvectors of the monodromy matrix. When f2(T) = 0 away
    from a band edge the self-matching solution is f2 itself (alpha = None).

    Raises:
        QuadraticDegenerateError: If f2(T) alpha^2 + (f1(T) - f2'(T)) alpha - f1'(T)
            vanishes identically while the monodromy is not a multiple of the identity
    """
    fundamental = fundamental_system(discriminant, lam)
    M = fundamental.monodromy()
    D = complex(np.trace(M))
    root = cmath.sqrt(D * D - 4.0)
    # branch with |beta_minus| >= |beta_plus|
    if (D.conjugate() * root).real < 0:
        root = -root
    beta_plus = (D - root) / 2.0
    beta_minus = (D + root) / 2.0

    scale = max(float(np.max(np.abs(M))), 1.0)
    tiny = edge_tol * scale
    quadratic = (M[0, 1], M[0, 0] - M[1, 1], -M[1, 0])
    identity_like = abs(M[0, 1]) <= tiny and abs(M[1, 0]) <= tiny and abs(M[0, 0] - M[1, 1]) <= tiny
    if all(abs(c) <= tiny for c in quadratic) and not identity_like:
        raise QuadraticDegenerateError(f"Self-matching quadratic vanishes at lambda = {lam}")

    edge = abs(D * D - 4.0) <= edge_tol * max(1.0, abs(D) ** 2)

    def matching(beta: complex) -> tuple[complex | None, SampledFunction]:
        if identity_like:
            return 0.0, fundamental.f1
        if abs(M[0, 1]) > tiny:
            alpha = (beta - M[0, 0]) / M[0, 1]
            return alpha, fundamental.f1 + alpha * fundamental.f2
        if abs(beta - M[1, 1]) > tiny:
            alpha = M[1, 0] / (beta - M[1, 1])
            return alpha, fundamental.f1 + alpha * fundamental.f2
        return None, fundamental.f2

    alpha_plus, F_plus = matching(beta_plus)
    alpha_minus, F_minus = matching(beta_minus)
    if edge or identity_like:
        logger.debug(f"lambda = {lam} is a band edge (D = {D:.12g})")
    return BlochSolution(
        lam=lam,
        beta_plus=beta_plus,
        beta_minus=beta_minus,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        F_plus=F_plus,
        F_minus=F_minus,
        degenerate=bool(edge or identity_like),
    )


@dataclass(frozen=True)
class SusyPartner:
    """Darboux partner problem with its nodeless solution and discriminant."""

    q_tilde: SampledFunction
    problem: PeriodicProblem
    f0_tilde: ParticularSolution
    discriminant: DiscriminantSeries


def superpotential_derivative(problem: PeriodicProblem, f0: ParticularSolution) -> SampledFunction:
    """Phi' for Phi = -sqrt(p) f0'/f0, with f0'' taken from the equation."""
    p = problem.p
    sqrt_p = p.apply(np.sqrt)
    dp = p.derivative(1)
    d_sqrt_p = sqrt_p.derivative(1)
    ratio = f0.u0_prime / f0.u0
    f0_second = ((problem.q - f0.lambda_center) * f0.u0 - dp * f0.u0_prime) / p
    return -(d_sqrt_p * ratio) - sqrt_p * (f0_second / f0.u0 - ratio * ratio)


def susy_partner(
    problem: PeriodicProblem,
    f0: ParticularSolution,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> SusyPartner:
    """
    q~ = q + 2 sqrt(p) Phi' - sqrt(p) (sqrt(p))'' with nodeless partner solution
    f~0 = 1 / (sqrt(p) f0) at the same lambda0; its discriminant equals D.

    Derivatives of sqrt(p) come from spline differentiation of the samples.
    """
    sqrt_p = problem.p.apply(np.sqrt)
    phi_prime = superpotential_derivative(problem, f0)
    q_tilde = problem.q + 2.0 * sqrt_p * phi_prime - sqrt_p * sqrt_p.derivative(2)
    q_tilde = SampledFunction(problem.grid, q_tilde.real)
    partner = PeriodicProblem(p=problem.p, q=q_tilde)

    product = sqrt_p * f0.u0
    f0_tilde = 1.0 / product
    f0_tilde_prime = -(sqrt_p.derivative(1) * f0.u0 + sqrt_p * f0.u0_prime) / (product * product)
    partner_f0 = ParticularSolution(
        u0=f0_tilde, u0_prime=f0_tilde_prime, lambda_center=f0.lambda_center
    )
    discriminant = discriminant_series(
        partner, partner_f0, N, DiscriminantSource.PERIODIC_F0, settings, numerics
    )
    logger.info(f"Built SUSY partner (max |q~ - q| = {(q_tilde - problem.q).max_abs():.3e})")
    return SusyPartner(
        q_tilde=q_tilde, problem=partner, f0_tilde=partner_f0, discriminant=discriminant
    )


def sample_discriminant(discriminant: DiscriminantSeries, lambdas) -> list[tuple[float, float]]:
    """Rows (lambda, Re D_N(lambda)) for export."""
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.real(discriminant.evaluate(lambdas))
    return [(float(lam), float(value)) for lam, value in zip(lambdas, values)]


def solve_hill(
    problem: PeriodicProblem,
    N: int = 120,
    count: int = 11,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> HillResult:
    """lambda0, the nodeless periodic f0, the discriminant around lambda0 and the band edges."""
    lambda0 = lowest_eigenvalue(problem, N, settings, numerics)
    f0 = nodeless_periodic_f0(problem, lambda0, N, numerics)
    discriminant = discriminant_series(
        problem, f0, N, DiscriminantSource.PERIODIC_F0, settings, numerics
    )
    edges = band_edges(problem, discriminant, count, settings, numerics, lambda0)
    return HillResult(lambda0=lambda0, f0=f0, discriminant=discriminant, edges=edges)
