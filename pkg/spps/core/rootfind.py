"""
Zeros of truncated characteristic series.

Global localization uses companion-matrix eigenvalues of the (variable-scaled)
polynomial; every candidate is Newton-polished on the series and then has to
pass the trust radius, the region constraint, a relative residual test and a
truncation-stability test (the root must persist when N drops by N/6).
Real-interval searches additionally sign-scan Re k_N; scanned roots face the
same truncation-stability test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import companion, eigvals
from scipy.optimize import brentq

from spps.config.models import RootFindConfig
from spps.core.models import (
    DiscardedRoot,
    DiscardReason,
    RegionKind,
    Root,
    RootConstraint,
    RootReport,
)
from spps.exceptions import DegenerateSeriesError, NoConvergenceError
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

_TINY = 1e-300
_LOG_SPAN = 60.0


def default_trust_radius(coeffs: np.ndarray, tail_ratio: float = 1e-10) -> float:
    """
    Largest r with |a_N| r^N < tail_ratio * max_k |a_k| r^k (bisection in log r).

    The ratio is nondecreasing in r, so the admissible set is an interval.
    """
    mags = np.abs(np.asarray(coeffs))
    nonzero = np.flatnonzero(mags > _TINY)
    if nonzero.size == 0:
        return 0.0
    last = nonzero[-1]
    if last == 0:
        return math.inf
    logs = np.log(mags[nonzero])
    powers = nonzero.astype(float)
    log_ratio = math.log(tail_ratio)

    def excess(t: float) -> float:
        return logs[-1] + last * t - np.max(logs + powers * t) - log_ratio

    lo, hi = -_LOG_SPAN, _LOG_SPAN
    if excess(hi) < 0:
        return math.exp(hi)
    if excess(lo) >= 0:
        return math.exp(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return math.exp(lo)


@dataclass(frozen=True, eq=False)
class CharacteristicSeries:
    """Taylor coefficients a_0..a_N of k(l) around ``center``."""

    center: complex
    coeffs: np.ndarray
    trust_radius: float

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size < 2:
            raise ValueError("A characteristic series needs at least two coefficients")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Characteristic series coefficients must be finite")
        if not self.trust_radius > 0:
            raise ValueError(f"trust_radius must be > 0, got: {self.trust_radius}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coefficients(
        cls, center: complex, coeffs, trust_radius: float | None = None, tail_ratio: float = 1e-10
    ) -> CharacteristicSeries:
        """Build a series; the trust radius defaults to the tail-decay rule."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if trust_radius is None:
            trust_radius = default_trust_radius(coeffs, tail_ratio)
            if trust_radius <= 0:
                raise DegenerateSeriesError("All coefficients of the series vanish")
        return cls(center=complex(center), coeffs=coeffs, trust_radius=trust_radius)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def evaluate(self, lam):
        return P.polyval(np.asarray(lam) - self.center, self.coeffs)

    def derivative(self, lam):
        return P.polyval(np.asarray(lam) - self.center, P.polyder(self.coeffs))

    def magnitude(self, lam):
        """sum |a_k| |l - center|^k (scale of the summed terms)."""
        return P.polyval(np.abs(np.asarray(lam) - self.center), np.abs(self.coeffs))

    def truncated(self, order: int) -> CharacteristicSeries:
        order = max(1, min(order, self.N))
        return replace(self, coeffs=self.coeffs[: order + 1])

    def plus_constant(self, value: complex) -> CharacteristicSeries:
        """Series of k(l) + value (e.g. D(l) -+ 2)."""
        coeffs = self.coeffs.copy()
        coeffs[0] += value
        return replace(self, coeffs=coeffs)


def estimate_error(series: CharacteristicSeries, lam: complex, noise: float = 1e-15) -> float:
    """First-order root error caused by relative coefficient noise."""
    slope = abs(series.derivative(lam))
    scale = series.magnitude(lam)
    if slope == 0:
        return math.inf
    return float(noise * scale / slope + np.finfo(float).eps * abs(lam))


def relative_residual(series: CharacteristicSeries, lam: complex) -> float:
    scale = series.magnitude(lam)
    if scale == 0:
        return 0.0
    return float(abs(series.evaluate(lam)) / scale)


def polynomial_roots(series: CharacteristicSeries) -> list[complex]:
    """
    All roots of the truncated polynomial, as absolute l values.

    The variable is rescaled so that the lowest and highest nonzero
    coefficients have equal magnitude before the companion matrix is formed;
    LAPACK balances the companion matrix before the QR iteration.

    Raises:
        DegenerateSeriesError: If every coefficient is below 1e-300
    """
    mags = np.abs(series.coeffs)
    nonzero = np.flatnonzero(mags > _TINY)
    if nonzero.size == 0:
        raise DegenerateSeriesError("All coefficients of the series are below 1e-300")
    low, high = nonzero[0], nonzero[-1]
    roots = [series.center] * int(low)
    if high == low:
        return roots

    a = series.coeffs[low : high + 1]
    degree = high - low
    log_mags = np.full(a.size, -np.inf)
    present = np.abs(a) > _TINY
    log_mags[present] = np.log(np.abs(a[present]))
    log_s = (log_mags[0] - log_mags[-1]) / degree
    scaled_logs = log_mags + np.arange(a.size) * log_s
    shift = np.max(scaled_logs[present])
    with np.errstate(under="ignore"):
        b = np.where(present, a / np.where(present, np.abs(a), 1.0), 0.0) * np.exp(
            np.where(present, scaled_logs - shift, -np.inf)
        )
    # trailing coefficients that underflowed carry no information
    keep = np.flatnonzero(np.abs(b) > 1e-100)
    b = b[: keep[-1] + 1]
    if b.size < 2:
        return roots
    t = eigvals(companion(b[::-1]))
    scale = math.exp(log_s)
    roots.extend(series.center + scale * t)
    return [complex(r) for r in roots]


def refine_newton(
    series: CharacteristicSeries,
    lambda0: complex,
    max_iter: int = 40,
    tol: float = 1e-14,
) -> complex:
    """
    Newton iteration on k_N with the analytic derivative.

    Stops when |step| < tol (1 + |l|).

    Raises:
        NoConvergenceError: If the derivative vanishes or max_iter is reached
    """
    lam = complex(lambda0)
    for _ in range(max_iter):
        value = series.evaluate(lam)
        slope = series.derivative(lam)
        if slope == 0:
            if value == 0:
                return lam
            raise NoConvergenceError(f"Vanishing derivative during Newton at {lam}")
        step = value / slope
        lam = lam - step
        if abs(step) < tol * (1.0 + abs(lam)):
            return complex(lam)
    raise NoConvergenceError(f"Newton did not converge from {lambda0} in {max_iter} iterations")


def _polish(series: CharacteristicSeries, lam: complex, settings: RootFindConfig) -> complex:
    """Newton polish that keeps the better of start/end when convergence stalls."""
    try:
        return refine_newton(series, lam, settings.newton_max_iter, settings.newton_tol)
    except NoConvergenceError:
        logger.debug(f"Newton stalled near {lam}; keeping the companion estimate")
        return lam


def _is_stable(
    series: CharacteristicSeries, lam: complex, error: float, settings: RootFindConfig
) -> bool:
    lower = series.N - math.ceil(series.N / 6)
    if lower < 1:
        return True
    truncated = series.truncated(lower)
    try:
        moved = refine_newton(truncated, lam, settings.newton_max_iter, settings.newton_tol)
    except NoConvergenceError:
        return False
    allowed = settings.tol_stab * (1.0 + abs(lam)) + 2.0 * error
    return abs(moved - lam) <= allowed


def _dedupe(roots: list[Root], settings: RootFindConfig) -> tuple[list[Root], list[DiscardedRoot]]:
    kept: list[Root] = []
    dropped: list[DiscardedRoot] = []
    for root in sorted(roots, key=lambda r: r.error_estimate):
        twin = next(
            (
                i
                for i, other in enumerate(kept)
                if abs(other.value - root.value)
                <= max(
                    settings.dedupe_tol * (1.0 + abs(root.value)),
                    10.0 * (other.error_estimate + root.error_estimate),
                )
            ),
            None,
        )
        if twin is None:
            kept.append(root)
        else:
            kept[twin] = replace(kept[twin], multiplicity=kept[twin].multiplicity + 1)
            dropped.append(DiscardedRoot(root.value, DiscardReason.DUPLICATE))
    return kept, dropped


def filter_roots(
    series: CharacteristicSeries,
    raw: list[complex],
    constraint: RootConstraint | None = None,
    settings: RootFindConfig | None = None,
) -> RootReport:
    """
    Keep candidates inside the trust radius and the region whose residual is
    small and which persist under a lower truncation order.
    """
    settings = settings or RootFindConfig()
    constraint = constraint or RootConstraint.none()
    accepted: list[Root] = []
    report = RootReport()
    for lam in raw:
        lam = complex(lam)
        if abs(lam - series.center) > series.trust_radius:
            report.discarded.append(DiscardedRoot(lam, DiscardReason.OUT_OF_TRUST))
            continue
        if not constraint.admits(lam):
            report.discarded.append(DiscardedRoot(lam, DiscardReason.OUTSIDE_REGION))
            continue
        residual = relative_residual(series, lam)
        if residual > settings.tol_res:
            report.discarded.append(DiscardedRoot(lam, DiscardReason.RESIDUAL))
            continue
        error = estimate_error(series, lam, settings.coefficient_noise)
        if not _is_stable(series, lam, error, settings):
            report.discarded.append(DiscardedRoot(lam, DiscardReason.TRUNCATION_UNSTABLE))
            continue
        accepted.append(
            Root(
                value=lam,
                residual=residual,
                stable=True,
                error_estimate=error,
                center=series.center,
            )
        )
    report.roots, duplicates = _dedupe(accepted, settings)
    report.discarded.extend(duplicates)
    report.roots.sort(key=lambda r: (r.value.real, r.value.imag))
    return report


def real_roots_in_interval(
    series: CharacteristicSeries,
    lower: float,
    upper: float,
    settings: RootFindConfig | None = None,
    function=None,
) -> list[Root]:
    """
    Sign changes of Re k_N (or of ``function``) on [lower, upper], refined by brentq.

    Roots are Newton-polished on the series when no custom function is given.
    """
    settings = settings or RootFindConfig()
    if not upper > lower:
        return []
    f = function or (lambda x: float(np.real(series.evaluate(x))))
    xs = np.linspace(lower, upper, settings.scan_points + 1)
    values = np.array([f(x) for x in xs])
    found: list[Root] = []
    for i in range(settings.scan_points):
        left, right = values[i], values[i + 1]
        if left == 0.0:
            candidates = [xs[i]]
        elif left * right < 0.0:
            candidates = [brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)]
        else:
            continue
        for lam in candidates:
            if function is None:
                polished = _polish(series, complex(lam), settings)
                if abs(polished.imag) < settings.imag_tol * (1 + abs(polished)) and (
                    xs[i] <= polished.real <= xs[i + 1]
                ):
                    lam = polished.real
            found.append(
                Root(
                    value=complex(lam),
                    residual=relative_residual(series, lam),
                    stable=True,
                    error_estimate=estimate_error(series, lam, settings.coefficient_noise),
                    center=series.center,
                )
            )
    if values[-1] == 0.0:
        found.append(
            Root(value=complex(xs[-1]), residual=0.0, stable=True, center=series.center)
        )
    return found


def locate_roots(
    series: CharacteristicSeries,
    constraint: RootConstraint | None = None,
    settings: RootFindConfig | None = None,
) -> RootReport:
    """Companion roots, Newton polish, filtering, and the real-axis safety net."""
    settings = settings or RootFindConfig()
    constraint = constraint or RootConstraint.none()
    raw = polynomial_roots(series)
    polished = [
        _polish(series, lam, settings) if abs(lam - series.center) <= series.trust_radius else lam
        for lam in raw
    ]
    report = filter_roots(series, polished, constraint, settings)

    if constraint.kind is RegionKind.INTERVAL:
        lower = max(constraint.lower, series.center.real - series.trust_radius)
        upper = min(constraint.upper, series.center.real + series.trust_radius)
        scanned = real_roots_in_interval(series, lower, upper, settings)
        stable = []
        for r in scanned:
            if _is_stable(series, r.value, r.error_estimate, settings):
                stable.append(r)
            else:
                report.discarded.append(DiscardedRoot(r.value, DiscardReason.TRUNCATION_UNSTABLE))
        extra = [
            r
            for r in stable
            if r.residual <= settings.tol_res
            and all(
                abs(r.value - known.value) > settings.dedupe_tol * (1.0 + abs(r.value))
                and abs(r.value - known.value) > 10.0 * (r.error_estimate + known.error_estimate)
                for known in report.roots
            )
        ]
        if extra:
            logger.info(f"Sign scan recovered {len(extra)} real root(s) missed by the companion step")
            report.roots = sorted(report.roots + extra, key=lambda r: r.value.real)
    logger.debug(
        f"Located {len(report.roots)} root(s) around {series.center} "
        f"(trust radius {series.trust_radius:.3g}, {len(report.discarded)} discarded)"
    )
    return report
