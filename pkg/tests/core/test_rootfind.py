import math

import numpy as np
import pytest

from spps.config.models import RootFindConfig
from spps.core.models import DiscardReason, RootConstraint
from spps.core.rootfind import (
    CharacteristicSeries,
    default_trust_radius,
    locate_roots,
    polynomial_roots,
    real_roots_in_interval,
    refine_newton,
)
from spps.exceptions import DegenerateSeriesError, NoConvergenceError


def sine_series(order=40):
    coeffs = [0.0 if k % 2 == 0 else (-1) ** (k // 2) / math.factorial(k) for k in range(order + 1)]
    return CharacteristicSeries.from_coefficients(0.0, coeffs)


def cosine_series(order=40):
    coeffs = [(-1) ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(order + 1)]
    return CharacteristicSeries.from_coefficients(0.0, coeffs)


class TestCharacteristicSeries:
    def test_trust_radius_from_tail(self):
        series = sine_series()
        assert 8.0 < series.trust_radius < 20.0

    def test_degenerate_series(self):
        with pytest.raises(DegenerateSeriesError):
            CharacteristicSeries.from_coefficients(0.0, [0.0, 0.0, 0.0])

    def test_constant_has_infinite_radius(self):
        assert default_trust_radius(np.array([2.0, 0.0])) == math.inf

    def test_rejects_short_series(self):
        with pytest.raises(ValueError):
            CharacteristicSeries(center=0.0, coeffs=np.array([1.0]), trust_radius=1.0)

    def test_plus_constant_and_truncated(self):
        series = cosine_series(10)
        shifted = series.plus_constant(-1.0)
        assert shifted.coeffs[0] == 0
        assert series.truncated(4).N == 4
        assert series.evaluate(0.0) == pytest.approx(1.0)


class TestPolynomialRoots:
    def test_roots_of_known_polynomial(self):
        coeffs = np.polynomial.polynomial.polyfromroots([1.0, 2.0, -3j])
        series = CharacteristicSeries(center=0.0, coeffs=coeffs, trust_radius=10.0)
        roots = sorted(polynomial_roots(series), key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(roots, [-3j, 1.0, 2.0], atol=1e-10)

    def test_leading_zeros_give_roots_at_center(self):
        series = CharacteristicSeries(center=2.0, coeffs=np.array([0.0, 0.0, 1.0]), trust_radius=1.0)
        assert polynomial_roots(series) == [2.0, 2.0]

    def test_newton_converges_to_pi(self):
        assert abs(refine_newton(sine_series(), 3.0) - math.pi) < 1e-13

    def test_newton_iteration_cap(self):
        series = CharacteristicSeries(center=0.0, coeffs=np.array([1.0, 0.0, 1.0]), trust_radius=5.0)
        with pytest.raises(NoConvergenceError):
            refine_newton(series, 0.5, max_iter=5)


class TestLocateRoots:
    def test_sine_roots_in_interval(self):
        report = locate_roots(sine_series(), RootConstraint.interval(-7.0, 7.0))
        expected = [-2 * math.pi, -math.pi, 0.0, math.pi, 2 * math.pi]
        np.testing.assert_allclose(report.values.real, expected, atol=1e-10)
        assert all(root.stable for root in report.roots)

    def test_half_plane_constraint(self):
        report = locate_roots(sine_series(), RootConstraint.right_half_plane())
        assert all(v.real > 0 for v in report.values)
        assert any(d.reason is DiscardReason.OUTSIDE_REGION for d in report.discarded)

    def test_roots_beyond_trust_radius_are_discarded(self):
        report = locate_roots(sine_series())
        assert all(abs(v) <= sine_series().trust_radius for v in report.values)
        assert any(d.reason is DiscardReason.OUT_OF_TRUST for d in report.discarded)

    def test_sign_scan(self):
        roots = real_roots_in_interval(cosine_series(), 0.0, 4.0)
        assert len(roots) == 1
        assert abs(roots[0].value - math.pi / 2) < 1e-12

    def test_sign_scan_roots_must_be_truncation_stable(self):
        # -1 + 1e-3 l^6 vanishes at sqrt(10); its degree-5 truncation has no root at all
        coeffs = np.array([-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1e-3])
        series = CharacteristicSeries(center=0.0, coeffs=coeffs, trust_radius=10.0)
        report = locate_roots(series, RootConstraint.interval(0.0, 10.0))
        assert report.roots == []
        unstable = [d for d in report.discarded if d.reason is DiscardReason.TRUNCATION_UNSTABLE]
        assert len(unstable) >= 2
        assert all(abs(d.value - math.sqrt(10.0)) < 1e-6 for d in unstable)

    def test_sign_scan_with_custom_function(self):
        settings = RootFindConfig(scan_points=64)
        roots = real_roots_in_interval(
            cosine_series(), 0.0, 4.0, settings, function=lambda x: x - 1.5
        )
        assert roots[0].value == pytest.approx(1.5)

    def test_empty_interval(self):
        assert real_roots_in_interval(cosine_series(), 1.0, 1.0) == []


class TestRootConstraint:
    def test_interval_rejects_reversed_bounds(self):
        with pytest.raises(ValueError):
            RootConstraint.interval(2.0, 1.0)

    def test_admits(self):
        assert RootConstraint.disk(1.0, 0.5).admits(1.2 + 0.1j)
        assert not RootConstraint.interval(0.0, 1.0).admits(0.5 + 0.1j)
        assert RootConstraint.none().admits(100j)
