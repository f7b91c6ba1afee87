"""
Bound states of -u'' + Q u = lambda u on the whole line for

    Q(x) = alpha1 (x < 0),  q(x) (0 <= x <= h),  alpha2 (x > h).

With mu = sqrt(alpha1 - lambda) and nu = sqrt(alpha2 - lambda) an eigenfunction is
e^{mu x} for x < 0, u1 + (i - mu) u2 on [0, h] and u(h) e^{-nu (x - h)} for x > h,
where u1, u2 are the SPPS solutions built from u0(0) = 1, u0'(0) = i.  The
dispersion function is F(lambda) = u'(h) + nu u(h).

For alpha1 = alpha2 = 0, lambda = -mu^2 turns F into a polynomial in mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from spps.config.models import NumericsConfig, RootFindConfig
from spps.core.grid import SampledFunction, make_grid, sample
from spps.core.models import RootConstraint
from spps.core.rootfind import CharacteristicSeries, locate_roots
from spps.core.spps_core import (
    SLCoefficients,
    SppsSolutionPair,
    build_solution_pair,
    nonvanishing_u0,
)
from spps.exceptions import AlphasNotEqualError, LambdaOutOfRangeError
from spps.utils.concurrency import ordered_map
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

SCAN_POINTS = 1024
SUSPECT_IMAG = 1e-6


@dataclass(frozen=True)
class WellPotential:
    """Outer levels alpha1, alpha2 and q sampled on [0, h]."""

    alpha1: float
    alpha2: float
    q: SampledFunction

    def __post_init__(self):
        grid = self.q.grid
        if grid.a != 0.0 or grid.x0_index != 0:
            raise ValueError("The inside potential must be sampled on [0, h] anchored at 0")
        if np.max(np.abs(self.q.imag)) > 0:
            raise ValueError("q must be real")

    @classmethod
    def from_function(cls, q, h: float, m: int = 2000, alpha1: float = 0.0, alpha2: float = 0.0):
        return cls(alpha1=alpha1, alpha2=alpha2, q=sample(make_grid(0.0, h, m), q))

    @property
    def h(self) -> float:
        return self.q.grid.b

    @property
    def q_min(self) -> float:
        return float(np.min(self.q.real))

    @property
    def search_interval(self) -> tuple[float, float]:
        return self.q_min, min(self.alpha1, self.alpha2)

    def shifted(self, level: float) -> WellPotential:
        return WellPotential(self.alpha1 - level, self.alpha2 - level, self.q - level)

    @property
    def coefficients(self) -> SLCoefficients:
        grid = self.q.grid
        return SLCoefficients(
            p=SampledFunction.constant(grid, -1.0),
            q=self.q,
            r=SampledFunction.constant(grid, 1.0),
        )


@dataclass(frozen=True)
class WellMode:
    """A bound state described piecewise."""

    lam: float
    mu: float
    nu: float
    inside: SampledFunction
    inside_prime: SampledFunction
    matching_residual: float
    suspect: bool = False

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        grid = self.inside.grid
        h = grid.b
        u_h = self.inside.at(grid.m).real
        inner = np.interp(np.clip(x, 0.0, h), grid.nodes, self.inside.real)
        return np.where(
            x < 0.0,
            np.exp(self.mu * np.minimum(x, 0.0)),
            np.where(x > h, u_h * np.exp(-self.nu * np.maximum(x - h, 0.0)), inner),
        )


@dataclass
class WellSpectrum:
    eigenvalues: list[float] = field(default_factory=list)
    modes: list[WellMode] = field(default_factory=list)
    search_interval: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True, eq=False)
class DispersionEvaluator:
    """F(lambda) = u'(h) + nu u(h) from the Taylor coefficients of u1, u2 at h."""

    well: WellPotential
    pair: SppsSolutionPair
    value1: np.ndarray
    slope1: np.ndarray
    value2: np.ndarray
    slope2: np.ndarray

    def __call__(self, lam: float) -> complex:
        lower, upper = self.well.search_interval
        if lam >= upper:
            raise LambdaOutOfRangeError(
                f"lambda = {lam} is not below min(alpha1, alpha2) = {upper}"
            )
        mu = math.sqrt(self.well.alpha1 - lam)
        nu = math.sqrt(self.well.alpha2 - lam)
        z = lam - self.pair.center
        u1 = P.polyval(z, self.value1)
        du1 = P.polyval(z, self.slope1)
        u2 = P.polyval(z, self.value2)
        du2 = P.polyval(z, self.slope2)
        return complex(du1 + nu * u1 + (1j - mu) * (du2 + nu * u2))

    @property
    def tail(self) -> float:
        """Magnitude of the last coefficients (truncation indicator)."""
        return float(max(abs(c[-1]) for c in (self.value1, self.slope1, self.value2, self.slope2)))


def _pair(well: WellPotential, N: int, numerics: NumericsConfig) -> SppsSolutionPair:
    particular = nonvanishing_u0(
        well.coefficients,
        N,
        tail_tolerance=numerics.tail_tolerance,
        quadrature=numerics.quadrature,
    )
    return build_solution_pair(well.coefficients, particular, N, quadrature=numerics.quadrature)


def dispersion_series_general(
    well: WellPotential, N: int = 120, numerics: NumericsConfig | None = None
) -> DispersionEvaluator:
    """Evaluator of the dispersion function for arbitrary outer levels."""
    numerics = numerics or NumericsConfig()
    pair = _pair(well, N, numerics)
    end = pair.grid.m
    value1, slope1 = pair.taylor_coefficients("u1", end)
    value2, slope2 = pair.taylor_coefficients("u2", end)
    return DispersionEvaluator(well, pair, value1, slope1, value2, slope2)


def _even_in_mu(coeffs: np.ndarray) -> np.ndarray:
    """sum c_n lambda^n with lambda = -mu^2, as coefficients in mu."""
    out = np.zeros(2 * coeffs.size - 1, dtype=complex)
    out[::2] = coeffs * (-1.0) ** np.arange(coeffs.size)
    return out


def dispersion_series_mu(
    well: WellPotential,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
    evaluator: DispersionEvaluator | None = None,
) -> CharacteristicSeries:
    """
    F as a power series in mu for alpha1 = alpha2 = 0:

        F = (S1 + i S2) + mu (V1 - S2 + i V2) - mu^2 V2

    with V, S the value/slope series of u1, u2 at h in lambda = -mu^2.

    Raises:
        AlphasNotEqualError: If the outer levels are not both zero
    """
    settings = settings or RootFindConfig()
    if well.alpha1 != 0.0 or well.alpha2 != 0.0:
        raise AlphasNotEqualError(
            f"The mu-polynomial needs alpha1 = alpha2 = 0, got {well.alpha1}, {well.alpha2}"
        )
    evaluator = evaluator or dispersion_series_general(well, N, numerics)
    constant = _even_in_mu(evaluator.slope1 + 1j * evaluator.slope2)
    linear = _even_in_mu(evaluator.value1 - evaluator.slope2 + 1j * evaluator.value2)
    quadratic = _even_in_mu(evaluator.value2)
    coeffs = P.polyadd(P.polyadd(constant, P.polymulx(linear)), -P.polymulx(P.polymulx(quadratic)))
    return CharacteristicSeries.from_coefficients(0.0, coeffs, tail_ratio=settings.trust_tail_ratio)


def assemble_mode(evaluator: DispersionEvaluator, lam: float) -> WellMode:
    """Three-piece eigenfunction at ``lam`` with its matching residual at x = h."""
    well = evaluator.well
    mu = math.sqrt(well.alpha1 - lam)
    nu = math.sqrt(well.alpha2 - lam)
    pair = evaluator.pair
    first = pair.evaluate("u1", lam)
    second = pair.evaluate("u2", lam)
    value = np.asarray(first.value) + (1j - mu) * np.asarray(second.value)
    slope = np.asarray(first.derivative) + (1j - mu) * np.asarray(second.derivative)
    scale = max(float(np.max(np.abs(value))), float(np.max(np.abs(slope))))
    residual = abs(slope[-1] + nu * value[-1]) / scale
    imaginary = float(np.max(np.abs(value.imag))) / scale
    return WellMode(
        lam=lam,
        mu=mu,
        nu=nu,
        inside=SampledFunction(pair.grid, value.real),
        inside_prime=SampledFunction(pair.grid, slope.real),
        matching_residual=float(residual),
        suspect=imaginary > SUSPECT_IMAG,
    )


def _scan_general(evaluator: DispersionEvaluator, points: int = SCAN_POINTS) -> list[float]:
    lower, upper = evaluator.well.search_interval
    if not upper > lower:
        return []
    upper_open = upper - 1e-12 * (1.0 + abs(upper))
    xs = np.linspace(lower, upper_open, points + 1)
    values = np.array(ordered_map(lambda lam: evaluator(lam).real, xs))

    def f(lam: float) -> float:
        return evaluator(lam).real

    roots = []
    for i in range(points):
        if values[i] == 0.0:
            roots.append(float(xs[i]))
        elif values[i] * values[i + 1] < 0.0:
            roots.append(brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return roots


def solve_well(
    well: WellPotential,
    N: int = 120,
    settings: RootFindConfig | None = None,
    numerics: NumericsConfig | None = None,
) -> WellSpectrum:
    """
    Eigenvalues in [min q, min(alpha1, alpha2)).

    Equal outer levels are shifted to zero and solved through the mu-polynomial;
    otherwise Re F is scanned on 1024 subintervals and refined by brentq.
    """
    settings = settings or RootFindConfig()
    spectrum = WellSpectrum(search_interval=well.search_interval)
    if well.alpha1 == well.alpha2:
        level = well.alpha1
        shifted = well.shifted(level)
        evaluator = dispersion_series_general(shifted, N, numerics)
        upper_mu = math.sqrt(max(-shifted.q_min, 0.0))
        if upper_mu > 0.0:
            series = dispersion_series_mu(shifted, N, settings, numerics, evaluator)
            constraint = RootConstraint.interval(1e-12, upper_mu, settings.imag_tol)
            report = locate_roots(series, constraint, settings)
            lambdas = sorted(-(r.value.real**2) for r in report.roots)
        else:
            lambdas = []
        modes = [assemble_mode(evaluator, lam) for lam in lambdas]
        spectrum.eigenvalues = [lam + level for lam in lambdas]
        spectrum.modes = [replace(mode, lam=mode.lam + level) for mode in modes]
    else:
        evaluator = dispersion_series_general(well, N, numerics)
        lambdas = _scan_general(evaluator)
        spectrum.eigenvalues = lambdas
        spectrum.modes = [assemble_mode(evaluator, lam) for lam in lambdas]

    for mode in spectrum.modes:
        if mode.suspect:
            logger.warning(f"Eigenvalue {mode.lam:.12g}: dispersion function is not real there")
    logger.info(f"Well spectrum: {len(spectrum.eigenvalues)} bound state(s)")
    return spectrum


def parity(mode: WellMode, tolerance: float = 1e-5) -> int:
    """+1 (even), -1 (odd) or 0 about the center of [0, h]."""
    values = mode.inside.real
    scale = float(np.max(np.abs(values)))
    if np.max(np.abs(values - values[::-1])) <= tolerance * scale:
        return 1
    if np.max(np.abs(values + values[::-1])) <= tolerance * scale:
        return -1
    return 0
