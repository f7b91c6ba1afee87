"""
Reflection and transmission by an inhomogeneous layer 0 <= x <= d.

s-polarization solves u'' + (k^2 n^2 - beta^2) u = 0, written as the SL problem
p = 1, q = k^2 n^2, r = 1 with spectral parameter lambda = beta^2.
p-polarization solves n^2 (v'/n^2)' + (k^2 n^2 - beta^2) v = 0, i.e.
p = 1/n^2, q = k^2, r = 1/n^2.

The propagation constant is beta = k sin(theta) and the outer wavenumbers are
k_j = sqrt(k^2 n_j^2 - beta^2) for both polarizations, with the field and its
derivative continuous at x = 0 and x = d.  For an incident wave e^{-i k1 x} and
y1, y2 normalized at x = 0

    R = (-y1' - i k2 y1 + i k1 y2' - k1 k2 y2) / Delta
    T = 2 i k1 (y1 y2' - y1' y2) e^{i k2 d} / Delta
    Delta = y1' + i k2 y1 + i k1 y2' - k1 k2 y2

all evaluated at x = d.  One SPPS build per (layer, k) serves every angle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from spps.config.models import NumericsConfig
from spps.core.grid import SampledFunction, make_grid, sample
from spps.core.spps_core import SLCoefficients, SppsSolutionPair, build_solution_pair, nonvanishing_u0
from spps.exceptions import EvanescentWaveError
from spps.utils.concurrency import ordered_map
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

POLARIZATIONS = ("s", "p")


@dataclass(frozen=True)
class LayerProfile:
    """Refractive index n1 (x < 0), n(x) on [0, d], n2 (x > d)."""

    n1: float
    n2: float
    n: SampledFunction
    polarization: str = "s"

    def __post_init__(self):
        if self.n1 <= 0 or self.n2 <= 0:
            raise ValueError(f"Outer indices must be positive, got n1={self.n1}, n2={self.n2}")
        if np.any(self.n.real <= 0) or np.max(np.abs(self.n.imag)) > 0:
            raise ValueError("The layer index must be real and positive at every node")
        if self.n.grid.a != 0.0 or self.n.grid.x0_index != 0:
            raise ValueError("The layer index must be sampled on [0, d] anchored at 0")
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}, got: {self.polarization}")

    @classmethod
    def from_function(
        cls, n, d: float, n1: float, n2: float, m: int = 2000, polarization: str = "s"
    ) -> LayerProfile:
        return cls(n1=n1, n2=n2, n=sample(make_grid(0.0, d, m), n), polarization=polarization)

    @property
    def d(self) -> float:
        return self.n.grid.b

    def with_polarization(self, polarization: str) -> LayerProfile:
        return LayerProfile(self.n1, self.n2, self.n, polarization)

    def coefficients(self, k: float) -> SLCoefficients:
        grid = self.n.grid
        n_sq = self.n * self.n
        if self.polarization == "s":
            return SLCoefficients(
                p=SampledFunction.constant(grid, 1.0),
                q=k * k * n_sq,
                r=SampledFunction.constant(grid, 1.0),
            )
        inv = 1.0 / n_sq
        return SLCoefficients(p=inv, q=SampledFunction.constant(grid, k * k), r=inv)


@dataclass(frozen=True)
class PlaneWaveQuery:
    """
    Free-space wavenumber with either an incidence angle (radians) or the
    propagation constant itself.
    """

    k: float
    theta: float = 0.0
    beta_value: float | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k must be > 0, got: {self.k}")
        if self.beta_value is None:
            if not 0.0 <= self.theta < math.pi / 2:
                raise ValueError(f"theta must lie in [0, pi/2), got: {self.theta}")
        elif self.beta_value < 0:
            raise ValueError(f"beta must be >= 0, got: {self.beta_value}")

    @classmethod
    def from_degrees(cls, k: float, degrees: float) -> PlaneWaveQuery:
        return cls(k=k, theta=math.radians(degrees))

    @classmethod
    def from_beta(cls, k: float, beta: float) -> PlaneWaveQuery:
        theta = math.asin(beta / k) if beta < k else math.nan
        return cls(k=k, theta=theta, beta_value=beta)

    @property
    def beta(self) -> float:
        """k sin(theta), unless beta was given directly."""
        if self.beta_value is not None:
            return self.beta_value
        return self.k * math.sin(self.theta)


@dataclass(frozen=True)
class RTResult:
    theta: float
    R: complex
    T: complex
    energy_check: float
    wronskian: complex = 1.0
    evanescent: bool = False


@dataclass(frozen=True, eq=False)
class LayerSolutions:
    """Taylor coefficients in beta^2 of y1, y1', y2, y2' at x = d."""

    profile: LayerProfile
    k: float
    pair: SppsSolutionPair
    y1: tuple[np.ndarray, np.ndarray]
    y2: tuple[np.ndarray, np.ndarray]

    def at(self, beta_sq: float) -> tuple[complex, complex, complex, complex]:
        """y1(d), y1'(d), y2(d), y2'(d) for lambda = beta^2."""
        z = beta_sq - self.pair.center
        return (
            complex(P.polyval(z, self.y1[0])),
            complex(P.polyval(z, self.y1[1])),
            complex(P.polyval(z, self.y2[0])),
            complex(P.polyval(z, self.y2[1])),
        )

    def profiles(self, beta_sq: float) -> tuple[np.ndarray, np.ndarray]:
        """y1 and y2 over the whole layer."""
        first = self.pair.initial_value_solution(beta_sq, 1.0, 0.0)
        second = self.pair.initial_value_solution(beta_sq, 0.0, 1.0)
        return np.asarray(first.value), np.asarray(second.value)


def layer_solutions(
    profile: LayerProfile,
    k: float,
    N: int = 120,
    numerics: NumericsConfig | None = None,
    center: float = 0.0,
) -> LayerSolutions:
    """
    SPPS pair of the layer with y1(0)=1, y1'(0)=0, y2(0)=0, y2'(0)=1 as series
    in beta^2 around ``center``.
    """
    numerics = numerics or NumericsConfig()
    coeffs = profile.coefficients(k)
    particular = nonvanishing_u0(
        coeffs,
        N,
        center=center,
        tail_tolerance=numerics.tail_tolerance,
        quadrature=numerics.quadrature,
    )
    pair = build_solution_pair(coeffs, particular, N, quadrature=numerics.quadrature)
    end = pair.grid.m
    logger.debug(
        f"Layer solutions for k={k}, {profile.polarization}-polarization, N={N}, "
        f"beta^2 center {center:.6g}"
    )
    return LayerSolutions(
        profile=profile,
        k=k,
        pair=pair,
        y1=pair.initial_value_coefficients(1.0, 0.0, end),
        y2=pair.initial_value_coefficients(0.0, 1.0, end),
    )


def sweep_center(profile: LayerProfile, k: float, thetas: list[float]) -> float:
    """Midpoint of the propagating beta^2 values of an angle sweep."""
    cutoff = (k * min(profile.n1, profile.n2)) ** 2
    values = [
        (k * math.sin(theta)) ** 2 for theta in thetas if (k * math.sin(theta)) ** 2 < cutoff
    ]
    if not values:
        return 0.0
    return 0.5 * (min(values) + max(values))


def _wavenumbers(profile: LayerProfile, k: float, beta: float) -> tuple[float, float]:
    k1_sq = (k * profile.n1) ** 2 - beta**2
    k2_sq = (k * profile.n2) ** 2 - beta**2
    if k2_sq <= 0 or k1_sq <= 0:
        raise EvanescentWaveError(
            f"beta = {beta:.6g} exceeds k n for the {'substrate' if k2_sq <= 0 else 'ambient'}"
        )
    return math.sqrt(k1_sq), math.sqrt(k2_sq)


def energy_balance(profile: LayerProfile, k1: float, k2: float, R: complex, T: complex) -> float:
    """
    |R|^2 plus the transmitted flux ratio: k2/k1 for s and
    (k2/k1) (n(0)/n(d))^2 for p, where Im(conj(v) v') / n^2 is conserved.
    """
    ratio = k2 / k1
    if profile.polarization == "p":
        n = profile.n
        ratio *= (n.at(0).real / n.at(n.grid.m).real) ** 2
    return float(abs(R) ** 2 + ratio * abs(T) ** 2)


def _coefficients_from(
    profile: LayerProfile, k1: float, k2: float, y1, dy1, y2, dy2
) -> tuple[complex, complex, complex]:
    delta = dy1 + 1j * k2 * y1 + 1j * k1 * dy2 - k1 * k2 * y2
    R = (-dy1 - 1j * k2 * y1 + 1j * k1 * dy2 - k1 * k2 * y2) / delta
    W = y1 * dy2 - dy1 * y2
    T = 2j * k1 * W * cmath.exp(1j * k2 * profile.d) / delta
    return R, T, W


def reflectance_transmittance(
    profile: LayerProfile,
    query: PlaneWaveQuery,
    N: int = 120,
    solutions: LayerSolutions | None = None,
    numerics: NumericsConfig | None = None,
) -> RTResult:
    """
    R and T for one plane wave.  Without prebuilt ``solutions`` the series is
    centred at the query's beta^2.

    Raises:
        EvanescentWaveError: If k n2 <= beta (or k n1 <= beta)
    """
    beta = query.beta
    k1, k2 = _wavenumbers(profile, query.k, beta)
    if solutions is None:
        solutions = layer_solutions(profile, query.k, N, numerics, center=beta * beta)
    R, T, W = _coefficients_from(profile, k1, k2, *solutions.at(beta * beta))
    return RTResult(
        theta=query.theta,
        R=R,
        T=T,
        energy_check=energy_balance(profile, k1, k2, R, T),
        wronskian=W,
    )


def sweep(
    profile: LayerProfile,
    k: float,
    thetas: list[float],
    N: int = 120,
    numerics: NumericsConfig | None = None,
    workers: int | None = None,
) -> list[RTResult]:
    """
    R and T for many incidence angles (radians) from a single build centred
    among the propagating beta^2; evanescent angles are flagged.
    """
    if not thetas:
        return []
    solutions = layer_solutions(profile, k, N, numerics, center=sweep_center(profile, k, thetas))

    def one(theta: float) -> RTResult:
        try:
            return reflectance_transmittance(profile, PlaneWaveQuery(k, theta), solutions=solutions)
        except EvanescentWaveError:
            nan = complex(math.nan, math.nan)
            return RTResult(theta=theta, R=nan, T=nan, energy_check=math.nan, evanescent=True)

    results = ordered_map(one, thetas, workers)
    flagged = sum(r.evanescent for r in results)
    if flagged:
        logger.warning(f"{flagged} of {len(results)} angle(s) give an evanescent wave")
    return results


def helmholtz_equivalent_coefficients(profile: LayerProfile, k: float) -> SLCoefficients:
    """U = v/n solves U'' + (k^2 N^2 - beta^2) U = 0 with k^2 N^2 = k^2 n^2 + n''/n - 2 (n'/n)^2."""
    n = profile.n
    dn = n.derivative(1)
    d2n = n.derivative(2)
    ratio = dn / n
    grid = n.grid
    return SLCoefficients(
        p=SampledFunction.constant(grid, 1.0),
        q=k * k * n * n + d2n / n - 2.0 * ratio * ratio,
        r=SampledFunction.constant(grid, 1.0),
    )


def reflectance_via_helmholtz(
    profile: LayerProfile, query: PlaneWaveQuery, N: int = 120, numerics: NumericsConfig | None = None
) -> RTResult:
    """p-polarization R, T computed through the U = v/n Helmholtz form (cross-check)."""
    if profile.polarization != "p":
        raise ValueError("The Helmholtz cross-check applies to p-polarization")
    numerics = numerics or NumericsConfig()
    beta = query.beta
    k1, k2 = _wavenumbers(profile, query.k, beta)
    lam = beta * beta
    coeffs = helmholtz_equivalent_coefficients(profile, query.k)
    particular = nonvanishing_u0(
        coeffs,
        N,
        center=lam,
        tail_tolerance=numerics.tail_tolerance,
        quadrature=numerics.quadrature,
    )
    pair = build_solution_pair(coeffs, particular, N, quadrature=numerics.quadrature)
    end = pair.grid.m
    Y1 = pair.initial_value_solution(lam, 1.0, 0.0, at=end)
    Y2 = pair.initial_value_solution(lam, 0.0, 1.0, at=end)

    n = profile.n
    dn = n.derivative(1)
    n0, dn0 = n.at(0).real, dn.at(0).real
    nd, dnd = n.at(end).real, dn.at(end).real
    # v = n U normalized to y1(0)=1, y1'(0)=0 and y2(0)=0, y2'(0)=1
    vA, dvA = nd * Y1.value, dnd * Y1.value + nd * Y1.derivative
    vB, dvB = nd * Y2.value, dnd * Y2.value + nd * Y2.derivative
    y2, dy2 = vB / n0, dvB / n0
    y1, dy1 = (vA - dn0 * y2) / n0, (dvA - dn0 * dy2) / n0
    R, T, W = _coefficients_from(profile, k1, k2, y1, dy1, y2, dy2)
    return RTResult(
        theta=query.theta,
        R=R,
        T=T,
        energy_check=energy_balance(profile, k1, k2, R, T),
        wronskian=W,
    )


def slab_reflectance(
    n_slab: float, n1: float, n2: float, d: float, k: float, theta: float = 0.0
) -> complex:
    """
    Airy reflection coefficient of a homogeneous slab, in the e^{-i k1 x} incidence convention.

    r = (r12 + r23 e^{-2i delta}) / (1 + r12 r23 e^{-2i delta}), delta = k_slab d,
    with interface coefficients from the normal wavenumbers k_z = sqrt(k^2 n^2 - beta^2)
    and beta = k sin(theta).  Under field and derivative continuity this serves both
    polarizations.
    """
    beta = k * math.sin(theta)
    kz = [cmath.sqrt((k * n) ** 2 - beta**2) for n in (n1, n_slab, n2)]
    r12 = (kz[0] - kz[1]) / (kz[0] + kz[1])
    r23 = (kz[1] - kz[2]) / (kz[1] + kz[2])
    phase = cmath.exp(-2j * kz[1] * d)
    return (r12 + r23 * phase) / (1 + r12 * r23 * phase)
