"""
Discrete eigenvalues of the Zakharov-Shabat system

    n1' - lambda n1 = U n2,    n2' + lambda n2 = -U n1

for a real potential U supported on [-a, a].

With Q(x) = i * integral_{-a}^{x} U, the families X, Xtilde are built from the
unimodular weights e^{-2Q} / e^{2Q} anchored at x0 = -a, and lambda (Re > 0) is
an eigenvalue iff

    kappa(lambda) = sum_n lambda^n (e^{(-1)^n Q(a)} Xtilde(n)(a) + e^{(-1)^{n+1} Q(a)} X(n)(a)) = 0.

The coefficients are real for real U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from spps.config.models import NumericsConfig, RootFindConfig
from spps.core.formal_powers import (
    FamilyKind,
    FormalPowerFamily,
    Parity,
    WeightPair,
    build_family,
    evaluate_series,
)
from spps.core.grid import SampledFunction, make_grid, sample
from spps.core.models import Root, RootConstraint, SpectrumResult
from spps.core.rootfind import CharacteristicSeries, locate_roots, real_roots_in_interval
from spps.exceptions import ResidualTooLargeError
from spps.spectral.sl_spectral import merge_roots
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

UNIMODULAR_TOL = 1e-12
BOX_SCAN_POINTS = 20000


@dataclass(frozen=True)
class ZSPotential:
    """Real potential sampled on [-a, a], anchored at -a."""

    U: SampledFunction

    def __post_init__(self):
        grid = self.U.grid
        if grid.x0_index != 0:
            raise ValueError("The potential grid must be anchored at its left end")
        if not math.isclose(grid.a, -grid.b):
            raise ValueError(f"The support must be symmetric [-a, a], got [{grid.a}, {grid.b}]")
        if np.max(np.abs(self.U.imag)) > 0:
            raise ValueError("U must be real")

    @classmethod
    def from_function(cls, U, a: float, m: int = 2000) -> ZSPotential:
        return cls(U=sample(make_grid(-a, a, m), U))

    @classmethod
    def box(cls, A: float, a: float = 1.0, m: int = 2000) -> ZSPotential:
        return cls.from_function(A, a, m)

    @property
    def a(self) -> float:
        return self.U.grid.b

    def area(self, quadrature: str = "spline") -> float:
        """integral of U over the support."""
        return float(self.U.integral(quadrature).at(self.U.grid.m).real)


@dataclass(frozen=True, eq=False)
class ZSDispersion:
    """Q, the two families and the coefficients a_0..a_N of kappa."""

    potential: ZSPotential
    Q: SampledFunction
    xtilde: FormalPowerFamily
    x: FormalPowerFamily
    coeffs: np.ndarray

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def evaluate(self, lam: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(lam, self.coeffs))

    def unimodularity_defect(self) -> float:
        """max | |e^{2Q}| - 1 | over the nodes."""
        return float(np.max(np.abs(np.abs(np.exp(2.0 * self.Q.values)) - 1.0)))


@dataclass(frozen=True)
class ZSEigenpair:
    lam: complex
    n1: SampledFunction
    n2: SampledFunction
    psi: tuple[np.ndarray, np.ndarray]
    phi: tuple[np.ndarray, np.ndarray]
    boundary_residual: float
    dirac_residual: float = math.nan


@dataclass
class _SplitSums:
    """Even- and odd-index partial sums sum lambda^n member[n] of one family."""

    even: np.ndarray | complex
    odd: np.ndarray | complex


def zs_dispersion(
    potential: ZSPotential, N: int = 120, numerics: NumericsConfig | None = None
) -> ZSDispersion:
    """Coefficients a_n, n = 0..N, of the dispersion function (full-index series)."""
    numerics = numerics or NumericsConfig()
    Q = 1j * potential.U.integral(numerics.quadrature)
    weights = WeightPair(
        w_odd=Q.apply(lambda v: np.exp(2.0 * v)), w_even=Q.apply(lambda v: np.exp(-2.0 * v))
    )
    xtilde = build_family(FamilyKind.XTILDE, weights, N, quadrature=numerics.quadrature)
    x = build_family(FamilyKind.X, weights, N, quadrature=numerics.quadrature)

    end = potential.U.grid.m
    Qa = Q.at(end)
    signs = (-1.0) ** np.arange(N + 1)
    coeffs = np.exp(signs * Qa) * xtilde.table[:, end] + np.exp(-signs * Qa) * x.table[:, end]
    dispersion = ZSDispersion(potential=potential, Q=Q, xtilde=xtilde, x=x, coeffs=coeffs)

    defect = dispersion.unimodularity_defect()
    if defect > UNIMODULAR_TOL:
        logger.warning(f"|e^(2Q)| departs from 1 by {defect:.3e}")
    logger.debug(f"ZS dispersion of degree {N}: a0 = {coeffs[0].real:.15g}")
    return dispersion


def _split_sums(family: FormalPowerFamily, lam: complex, at: int | None = None) -> _SplitSums:
    z = lam * lam
    even = evaluate_series(family, Parity.EVEN, 0, z, at).value
    odd = evaluate_series(family, Parity.ODD, 1, z, at).value
    return _SplitSums(even=even, odd=lam * odd)


def zs_eigenvalues(
    potential: ZSPotential,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
    dispersion: ZSDispersion | None = None,
) -> SpectrumResult:
    """
    Zeros of kappa_N in Re(lambda) > 0.

    Real roots (also recovered by a sign scan along the positive axis) are the
    eigenvalues; nonreal roots that pass the filters go to ``nonreal``.
    """
    settings = settings or RootFindConfig()
    dispersion = dispersion or zs_dispersion(potential, N, numerics)
    series = CharacteristicSeries.from_coefficients(
        0.0, dispersion.coeffs.real, tail_ratio=settings.trust_tail_ratio
    )
    report = locate_roots(series, RootConstraint.right_half_plane(), settings)
    upper = series.trust_radius if math.isfinite(series.trust_radius) else 0.0
    scanned = [
        r
        for r in real_roots_in_interval(series, 1e-12, upper, settings)
        if r.residual <= settings.tol_res
    ]
    roots = merge_roots(report.roots, scanned, settings)

    result = SpectrumResult(truncation_order=N, discarded=report.discarded, centers=[0.0])
    for root in roots:
        if root.is_real(settings.imag_tol):
            result.eigenvalues.append(_as_real(root))
        else:
            result.nonreal.append(root)
    result.eigenvalues.sort(key=lambda r: r.value.real)
    _check_conjugates(result.nonreal, settings)
    logger.info(
        f"ZS spectrum: {len(result.eigenvalues)} real eigenvalue(s), {len(result.nonreal)} nonreal"
    )
    return result


def _as_real(root: Root) -> Root:
    return replace(root, value=complex(root.value.real, 0.0))


def _check_conjugates(roots: list[Root], settings: RootFindConfig) -> None:
    for root in roots:
        partner = root.value.conjugate()
        tolerance = settings.dedupe_tol * (1 + abs(partner))
        if not any(abs(other.value - partner) <= tolerance for other in roots):
            logger.warning(f"Nonreal root {root.value:.10g} has no conjugate partner")


def zs_general_solution(
    dispersion: ZSDispersion, lam: complex, c1: complex = 1.0, c2: complex | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    n1, n2 over [-a, a] for the combination (c1, c2); c2 defaults to lambda.

    The c2 branch carries 1/lambda and needs lambda != 0.
    """
    c2 = lam if c2 is None else c2
    if c2 != 0 and lam == 0:
        raise ValueError("The c2 branch of the general solution needs lambda != 0")
    eQ = np.exp(dispersion.Q.values)
    emQ = np.exp(-dispersion.Q.values)
    tilde = _split_sums(dispersion.xtilde, lam)
    plain = _split_sums(dispersion.x, lam)
    first = eQ * tilde.even + emQ * tilde.odd
    first_alt = eQ * tilde.even - emQ * tilde.odd
    n1 = 0.5 * c1 * first
    n2 = 0.5j * c1 * first_alt
    if c2 != 0:
        second = emQ * plain.even + eQ * plain.odd
        second_alt = emQ * plain.even - eQ * plain.odd
        n1 = n1 + c2 / (2 * lam) * second
        n2 = n2 - 1j * c2 / (2 * lam) * second_alt
    return n1, n2


def dirac_residual(potential: ZSPotential, lam: complex, n1: np.ndarray, n2: np.ndarray) -> float:
    """
    Relative residual of (d + q) u = lambda v and (d - q) v = lambda u with
    u = n1 + i n2, v = n1 - i n2, q = iU (spline derivatives, interior nodes).
    """
    grid = potential.U.grid
    u = SampledFunction(grid, n1 + 1j * n2)
    v = SampledFunction(grid, n1 - 1j * n2)
    q = 1j * potential.U.values
    du = u.derivative().values
    dv = v.derivative().values
    first = du + q * u.values - lam * v.values
    second = dv - q * v.values - lam * u.values
    inner = slice(2, grid.m - 1)
    scale = max(
        float(np.max(np.abs(du))),
        abs(lam) * float(np.max(np.abs(v.values))),
        np.finfo(float).tiny,
    )
    return float(max(np.max(np.abs(first[inner])), np.max(np.abs(second[inner]))) / scale)


def zs_eigenvector(
    potential: ZSPotential, dispersion: ZSDispersion, lam: complex, tolerance: float = 1e-6
) -> ZSEigenpair:
    """
    n = psi + phi with n1(-a) = 1, n2(-a) = 0.

    Raises:
        ResidualTooLargeError: If |n1(a)| > tolerance * max|n1|
    """
    eQ = np.exp(dispersion.Q.values)
    emQ = np.exp(-dispersion.Q.values)
    tilde = _split_sums(dispersion.xtilde, lam)
    plain = _split_sums(dispersion.x, lam)
    psi = (
        0.5 * (eQ * tilde.even + emQ * tilde.odd),
        0.5j * (eQ * tilde.even - emQ * tilde.odd),
    )
    phi = (
        0.5 * (emQ * plain.even + eQ * plain.odd),
        -0.5j * (emQ * plain.even - eQ * plain.odd),
    )
    n1 = psi[0] + phi[0]
    n2 = psi[1] + phi[1]
    scale = max(float(np.max(np.abs(n1))), np.finfo(float).tiny)
    residual = abs(n1[-1]) / scale
    if residual > tolerance:
        raise ResidualTooLargeError(
            f"|n1(a)| / max|n1| = {residual:.3e} exceeds {tolerance:g} at lambda = {lam}"
        )
    grid = potential.U.grid
    return ZSEigenpair(
        lam=lam,
        n1=SampledFunction(grid, n1),
        n2=SampledFunction(grid, n2),
        psi=psi,
        phi=phi,
        boundary_residual=float(residual),
        dirac_residual=dirac_residual(potential, lam, n1, n2),
    )


def box_dispersion(lam: float, A: float, a: float = 1.0) -> float:
    """gamma cos(2 gamma a) + lambda sin(2 gamma a), gamma = sqrt(A^2 - lambda^2)."""
    gamma = math.sqrt(A * A - lam * lam)
    return gamma * math.cos(2.0 * gamma * a) + lam * math.sin(2.0 * gamma * a)


def box_oracle(A: float, a: float = 1.0, points: int = BOX_SCAN_POINTS) -> list[float]:
    """Real roots in (0, A) of the closed-form box dispersion relation."""
    if A <= 0:
        raise ValueError(f"A must be > 0, got: {A}")
    xs = np.linspace(0.0, A, points + 1)[1:-1]
    values = np.array([box_dispersion(x, A, a) for x in xs])
    roots = []
    for i in range(xs.size - 1):
        if values[i] == 0.0:
            roots.append(float(xs[i]))
        elif values[i] * values[i + 1] < 0.0:
            roots.append(
                brentq(box_dispersion, xs[i], xs[i + 1], args=(A, a), xtol=1e-14, rtol=1e-15)
            )
    return roots


@dataclass
class ZSResult:
    spectrum: SpectrumResult
    dispersion: ZSDispersion
    eigenpairs: list[ZSEigenpair] = field(default_factory=list)


def solve_zs(
    potential: ZSPotential,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
    eigenvectors: bool = False,
) -> ZSResult:
    """Eigenvalues and, on request, eigenvectors of one potential."""
    dispersion = zs_dispersion(potential, N, numerics)
    spectrum = zs_eigenvalues(potential, N, settings, numerics, dispersion)
    result = ZSResult(spectrum=spectrum, dispersion=dispersion)
    if eigenvectors:
        for root in spectrum.eigenvalues:
            try:
                result.eigenpairs.append(zs_eigenvector(potential, dispersion, root.value.real))
            except ResidualTooLargeError as e:
                logger.warning(str(e))
    return result
