"""
Regular Sturm-Liouville eigenproblems (p u')' + q u = lambda r u on [a, b].

Left condition  u(a) cos(alpha) + u'(a) sin(alpha) = 0.
Right condition either unmixed, u(b) cos(beta) + u'(b) sin(beta) = 0, or
spectral-parameter dependent with polynomial phi:

    beta1 u(b) - beta2 u'(b) = phi(lambda) (beta1' u(b) - beta2' u'(b))

The solution satisfying the left condition is written with the SPPS pair of an
expansion center; substituting it into the right condition gives the Taylor
coefficients of the characteristic function around that center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from spps.config.models import NumericsConfig, RootFindConfig
from spps.core.models import DiscardedRoot, DiscardReason, Root, RootConstraint, SpectrumResult
from spps.core.rootfind import CharacteristicSeries, locate_roots
from spps.core.spps_core import (
    ParticularSolution,
    SLCoefficients,
    SolutionProfile,
    SppsSolutionPair,
    balanced_u0,
    build_solution_pair,
    nonvanishing_u0,
)
from spps.exceptions import (
    ParticularSolutionError,
    ShiftFailedError,
    UnsupportedBoundaryConditionError,
)
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryConditionUnmixed:
    """Angles of u(a)cos(alpha)+u'(a)sin(alpha)=0 and u(b)cos(beta)+u'(b)sin(beta)=0."""

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError(f"Boundary angles must be finite, got {self.alpha}, {self.beta}")

    @property
    def left_dirichlet(self) -> bool:
        return abs(math.sin(self.alpha)) < 1e-15


@dataclass(frozen=True)
class BoundaryConditionLambda:
    """beta1 u(b) - beta2 u'(b) = phi(l) (beta1p u(b) - beta2p u'(b)), phi ascending."""

    beta1: complex = 1.0
    beta2: complex = 0.0
    beta1p: complex = 0.0
    beta2p: complex = 0.0
    phi: tuple[complex, ...] = (0.0,)

    def __post_init__(self):
        if self.beta1 == 0 and self.beta2 == 0:
            raise ValueError("beta1 and beta2 cannot both vanish")
        object.__setattr__(self, "phi", tuple(complex(c) for c in self.phi) or (0j,))

    def factors(self, center: complex) -> tuple[np.ndarray, np.ndarray]:
        """phi1 = beta1 - beta1p phi and phi2 = beta2 - beta2p phi in powers of (l - center)."""
        shift = Polynomial([center, 1.0])
        phi = Polynomial(np.array(self.phi, dtype=complex))(shift)
        phi1 = (self.beta1 - self.beta1p * phi).coef
        phi2 = (self.beta2 - self.beta2p * phi).coef
        return np.asarray(phi1, dtype=complex), np.asarray(phi2, dtype=complex)


@dataclass(frozen=True)
class SLProblem:
    """Coefficients, boundary conditions and the region where eigenvalues are sought."""

    coeffs: SLCoefficients
    bc: BoundaryConditionUnmixed = field(default_factory=BoundaryConditionUnmixed)
    bc_right_lambda: BoundaryConditionLambda | None = None
    search: RootConstraint = field(default_factory=RootConstraint.none)

    def __post_init__(self):
        if self.coeffs.grid.x0_index != 0:
            raise ValueError("The SPPS families of an SL problem must be anchored at x = a")


def _boundary_series(
    problem: SLProblem, pair: SppsSolutionPair, at: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Taylor coefficients (in l - center) of u(x_at) and u'(x_at) for the solution
    with u(a) = sin(alpha), u'(a) = -cos(alpha).

    For alpha != 0 this is c1 (u1 + gamma u2) with
    gamma = -u0(a) p(a) (u0(a) cot(alpha) + u0'(a)); for alpha = 0 it is a
    multiple of u2.
    """
    alpha = problem.bc.alpha
    return pair.initial_value_coefficients(math.sin(alpha), -math.cos(alpha), at)


def characteristic_series_unmixed(
    problem: SLProblem, pair: SppsSolutionPair, settings: RootFindConfig | None = None
) -> CharacteristicSeries:
    """
    cos(beta) u(b) + sin(beta) u'(b) as a series in l - center.

    With a Dirichlet left end this is
    a_k = X(2k+1)(b)(cos b u0(b) + sin b u0'(b)) + sin b / (u0(b) p(b)) X(2k)(b).
    """
    settings = settings or RootFindConfig()
    value, slope = _boundary_series(problem, pair, pair.grid.m)
    beta = problem.bc.beta
    coeffs = math.cos(beta) * value + math.sin(beta) * slope
    return CharacteristicSeries.from_coefficients(
        pair.center, coeffs, tail_ratio=settings.trust_tail_ratio
    )


def characteristic_series_lambda_bc(
    problem: SLProblem, pair: SppsSolutionPair, settings: RootFindConfig | None = None
) -> CharacteristicSeries:
    """
    phi1(l) u(b) - phi2(l) u'(b) as a series in l - center (degree N + deg phi).

    Raises:
        UnsupportedBoundaryConditionError: If the left end is not Dirichlet
    """
    settings = settings or RootFindConfig()
    if problem.bc_right_lambda is None:
        raise ValueError("Problem has no spectral-parameter dependent right condition")
    if not problem.bc.left_dirichlet:
        raise UnsupportedBoundaryConditionError(
            f"Lambda-dependent right conditions need u(a) = 0, got alpha={problem.bc.alpha}"
        )
    value, slope = _boundary_series(problem, pair, pair.grid.m)
    phi1, phi2 = problem.bc_right_lambda.factors(pair.center)
    size = value.size + max(phi1.size, phi2.size) - 1
    coeffs = np.zeros(size, dtype=complex)
    first = np.convolve(phi1, value)
    second = np.convolve(phi2, slope)
    coeffs[: first.size] += first
    coeffs[: second.size] -= second
    return CharacteristicSeries.from_coefficients(
        pair.center, coeffs, tail_ratio=settings.trust_tail_ratio
    )


def characteristic_series(
    problem: SLProblem, pair: SppsSolutionPair, settings: RootFindConfig | None = None
) -> CharacteristicSeries:
    if problem.bc_right_lambda is not None:
        return characteristic_series_lambda_bc(problem, pair, settings)
    return characteristic_series_unmixed(problem, pair, settings)


def build_pair(
    problem: SLProblem,
    N: int,
    center: float = 0.0,
    particular: ParticularSolution | None = None,
    numerics: NumericsConfig | None = None,
) -> SppsSolutionPair:
    """SPPS pair at ``center``; u0 defaults to v1 + i p(a) v2 (center 0) or the balanced form."""
    numerics = numerics or NumericsConfig()
    if particular is None:
        builder = nonvanishing_u0 if center == 0 else balanced_u0
        particular = builder(
            problem.coeffs,
            N,
            center=center,
            tail_tolerance=numerics.tail_tolerance,
            quadrature=numerics.quadrature,
        )
    return build_solution_pair(problem.coeffs, particular, N, quadrature=numerics.quadrature)


def _same_root(a: Root, b: Root, settings: RootFindConfig) -> bool:
    gap = abs(a.value - b.value)
    return gap <= max(
        settings.dedupe_tol * (1.0 + abs(a.value)), 10.0 * (a.error_estimate + b.error_estimate)
    )


def merge_roots(found: list[Root], new: list[Root], settings: RootFindConfig) -> list[Root]:
    """
    Union of two root lists.

    Coinciding roots that agree to CONSISTENCY_TOL keep the better estimate;
    roots that disagree keep the one nearer to its expansion center.
    """
    merged = list(found)
    for root in new:
        twin = next((i for i, old in enumerate(merged) if _same_root(old, root, settings)), None)
        if twin is None:
            merged.append(root)
            continue
        old = merged[twin]
        if abs(old.value - root.value) > CONSISTENCY_TOL * (1.0 + abs(root.value)):
            logger.warning(
                f"Centers {old.center:.6g} and {root.center:.6g} disagree on an eigenvalue: "
                f"{old.value:.12g} vs {root.value:.12g}"
            )
            if abs(root.value - root.center) < abs(old.value - old.center):
                merged[twin] = root
        elif root.error_estimate < old.error_estimate:
            merged[twin] = root
    return merged


def _next_center(
    located: list[Root], excluded: list[complex], settings: RootFindConfig
) -> float | None:
    """Real located root farthest from the origin that is usable as an expansion point."""
    candidates = [
        r
        for r in located
        if r.is_real(settings.imag_tol)
        and r.relative_error <= settings.relaxed_tol
        and all(abs(r.value - c) > settings.dedupe_tol * (1.0 + abs(c)) for c in excluded)
    ]
    if not candidates:
        return None
    return float(max(candidates, key=lambda r: abs(r.value)).value.real)


def solve(
    problem: SLProblem,
    N: int = 120,
    shifts: int | None = None,
    particular: ParticularSolution | None = None,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> SpectrumResult:
    """
    Eigenvalues from the series at center 0 plus up to ``shifts`` recentred series.

    Only roots whose estimated relative error is below ``accept_tol`` are
    harvested. Each new center is the located real root farthest from the
    origin (estimated error below ``relaxed_tol``); it only fixes the expansion
    point, so a rough location is enough. A center whose nonvanishing solution
    cannot be built is recorded in ``failed_centers`` and the next candidate is
    tried.

    Args:
        problem: The spectral problem
        N: Truncation order
        shifts: Recentring rounds (defaults to settings.max_shifts)
        particular: Nonvanishing solution at lambda = 0 (required for complex coefficients)
        settings: Root finding tolerances
        numerics: Quadrature and tail settings

    Returns:
        SpectrumResult with eigenvalues sorted by real part
    """
    settings = settings or RootFindConfig()
    numerics = numerics or NumericsConfig()
    shifts = settings.max_shifts if shifts is None else shifts

    result = SpectrumResult(truncation_order=N)
    located: list[Root] = []
    pair = build_pair(problem, N, 0.0, particular, numerics)
    for round_index in range(shifts + 1):
        series = characteristic_series(problem, pair, settings)
        report = locate_roots(series, problem.search, settings)
        tight = [r for r in report.roots if r.relative_error <= settings.accept_tol]
        loose = [r for r in report.roots if r.relative_error > settings.accept_tol]
        result.centers.append(pair.center)
        result.eigenvalues = merge_roots(result.eigenvalues, tight, settings)
        result.discarded.extend(report.discarded)
        result.discarded.extend(DiscardedRoot(r.value, DiscardReason.INACCURATE) for r in loose)
        located.extend(report.roots)
        logger.info(
            f"Center {pair.center:.6g}: {len(tight)} root(s) harvested, {len(loose)} too inaccurate, "
            f"{len(report.discarded)} discarded"
        )
        if round_index == shifts:
            break
        pair = None
        while pair is None:
            center = _next_center(located, result.centers + result.failed_centers, settings)
            if center is None:
                break
            try:
                pair = build_pair(problem, N, center, None, numerics)
            except ParticularSolutionError as e:
                failure = ShiftFailedError(f"No nodeless solution at shift center {center}: {e}")
                logger.warning(str(failure))
                result.failed_centers.append(center)
        if pair is None:
            break

    result.eigenvalues.sort(key=lambda r: (r.value.real, r.value.imag))
    logger.info(f"SL spectrum: {len(result.eigenvalues)} eigenvalue(s) from {len(result.centers)} center(s)")
    return result


def eigenfunction(problem: SLProblem, pair: SppsSolutionPair, lam: complex) -> SolutionProfile:
    """Solution satisfying the left condition, with u(a), u'(a) = (sin alpha, -cos alpha)."""
    alpha = problem.bc.alpha
    return pair.initial_value_solution(lam, math.sin(alpha), -math.cos(alpha))


def boundary_residuals(problem: SLProblem, pair: SppsSolutionPair, lam: complex) -> tuple[float, float]:
    """Relative residuals of the left and right conditions for the eigenfunction at ``lam``."""
    profile = eigenfunction(problem, pair, lam)
    u = np.asarray(profile.value)
    du = np.asarray(profile.derivative)
    scale = max(float(np.max(np.abs(u))), float(np.max(np.abs(du))), np.finfo(float).tiny)
    alpha = problem.bc.alpha
    left = abs(u[0] * math.cos(alpha) + du[0] * math.sin(alpha)) / scale
    if problem.bc_right_lambda is not None:
        bc = problem.bc_right_lambda
        phi = complex(Polynomial(np.array(bc.phi, dtype=complex))(lam))
        phi1 = bc.beta1 - bc.beta1p * phi
        phi2 = bc.beta2 - bc.beta2p * phi
        weight = max(abs(phi1) + abs(phi2), np.finfo(float).tiny)
        right = abs(phi1 * u[-1] - phi2 * du[-1]) / (weight * scale)
    else:
        beta = problem.bc.beta
        right = abs(u[-1] * math.cos(beta) + du[-1] * math.sin(beta)) / scale
    return float(left), float(right)


def oscillation_count(problem: SLProblem, pair: SppsSolutionPair, lam: float) -> int:
    """Sign changes of the (real) eigenfunction candidate at ``lam`` inside (a, b]."""
    values = np.real(np.asarray(eigenfunction(problem, pair, lam).value))
    signs = np.sign(values[1:])
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
