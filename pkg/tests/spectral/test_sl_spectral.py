import math

import numpy as np
import pytest

from spps.config.models import RootFindConfig
from spps.core.grid import make_grid, sample
from spps.core.models import RootConstraint
from spps.core.spps_core import ParticularSolution, SLCoefficients
from spps.exceptions import UnsupportedBoundaryConditionError, VanishingSolutionError
from spps.spectral.sl_spectral import (
    BoundaryConditionLambda,
    BoundaryConditionUnmixed,
    SLProblem,
    boundary_residuals,
    build_pair,
    characteristic_series,
    merge_roots,
    oscillation_count,
    solve,
)


def problem_on(a, b, m=2000, p=-1.0, q=0.0, r=1.0, **kwargs):
    grid = make_grid(a, b, m)
    coeffs = SLCoefficients(p=sample(grid, p), q=sample(grid, q), r=sample(grid, r))
    return SLProblem(coeffs=coeffs, **kwargs)


class TestDirichletProblems:
    def test_negative_p_gives_squares(self):
        problem = problem_on(0.0, math.pi, search=RootConstraint.interval(0.5, 30.0))
        result = solve(problem, N=100)
        np.testing.assert_allclose(result.real_values()[:5], [1, 4, 9, 16, 25], atol=1e-7)
        assert result.truncation_order == 100

    def test_positive_p_gives_negative_squares(self):
        problem = problem_on(0.0, math.pi, p=1.0, search=RootConstraint.interval(-30.0, -0.5))
        result = solve(problem, N=100)
        np.testing.assert_allclose(result.real_values()[-3:], [-9, -4, -1], atol=1e-7)

    def test_recentring_adds_centers(self):
        problem = problem_on(0.0, math.pi, m=4000, search=RootConstraint.interval(0.5, 400.0))
        result = solve(problem, N=100, shifts=2)
        assert len(result.centers) >= 2
        assert result.centers[0] == 0
        values = result.real_values()
        assert values.size >= 15
        squares = np.arange(1, 16) ** 2
        np.testing.assert_allclose(values[:15], squares, atol=1e-7)

    def test_failed_shift_is_skipped(self, mocker):
        calls = []

        def flaky(problem, N, center=0.0, particular=None, numerics=None):
            calls.append(center)
            if len(calls) == 2:
                raise VanishingSolutionError(f"u0 vanishes for center {center}", node_index=7)
            return build_pair(problem, N, center, particular, numerics)

        mocker.patch("spps.spectral.sl_spectral.build_pair", side_effect=flaky)
        problem = problem_on(0.0, math.pi, search=RootConstraint.interval(0.5, 60.0))
        result = solve(problem, N=100, shifts=1)
        assert len(result.failed_centers) == 1
        assert len(result.centers) == 2
        assert result.failed_centers[0] not in result.centers
        assert calls[1] == result.failed_centers[0]
        np.testing.assert_allclose(result.real_values()[:3], [1, 4, 9], atol=1e-7)

    def test_neumann_left_end(self):
        # -u'' = lambda u, u'(0) = 0, u(pi) = 0 gives (n + 1/2)^2
        problem = problem_on(
            0.0,
            math.pi,
            bc=BoundaryConditionUnmixed(alpha=math.pi / 2, beta=0.0),
            search=RootConstraint.interval(0.1, 20.0),
        )
        result = solve(problem, N=100)
        np.testing.assert_allclose(result.real_values()[:3], [0.25, 2.25, 6.25], atol=1e-7)

    def test_boundary_residuals_at_eigenvalue(self):
        problem = problem_on(0.0, math.pi)
        pair = build_pair(problem, 80)
        left, right = boundary_residuals(problem, pair, 4.0)
        assert left < 1e-12
        assert right < 1e-8

    def test_oscillation_count(self):
        problem = problem_on(0.0, math.pi)
        pair = build_pair(problem, 80)
        assert oscillation_count(problem, pair, 2.25) == 1

    def test_problem_must_be_anchored_at_left_end(self):
        grid = make_grid(0.0, 1.0, 20, x0=0.5)
        coeffs = SLCoefficients(p=sample(grid, 1.0), q=sample(grid, 0.0), r=sample(grid, 1.0))
        with pytest.raises(ValueError):
            SLProblem(coeffs=coeffs)


class TestComplexCoefficients:
    def test_complex_potential_with_supplied_particular_solution(self):
        # -u'' + i u = lambda u on [0, pi] with u(0) = u(pi) = 0 has lambda = n^2 + i
        problem = problem_on(0.0, math.pi, q=1j)
        grid = problem.coeffs.grid
        s = np.exp(1j * math.pi / 4)
        particular = ParticularSolution(
            u0=sample(grid, lambda x: np.exp(s * x)),
            u0_prime=sample(grid, lambda x: s * np.exp(s * x)),
        )
        result = solve(problem, N=100, particular=particular)
        values = result.values
        for n in (1, 2, 3):
            assert np.min(np.abs(values - (n * n + 1j))) < 1e-7


class TestLambdaDependentConditions:
    def test_robin_condition_linear_in_lambda(self):
        # u'(1) = lambda u(1) with u = sin(k x): cos k = k sin k
        bc = BoundaryConditionLambda(beta1=0.0, beta2=-1.0, beta1p=1.0, beta2p=0.0, phi=(0.0, 1.0))
        problem = problem_on(
            0.0, 1.0, bc_right_lambda=bc, search=RootConstraint.interval(0.1, 10.0)
        )
        result = solve(problem, N=100)
        lam = result.real_values()[0]
        k = math.sqrt(lam)
        assert abs(math.cos(k) - k * math.sin(k)) < 1e-8

    def test_series_degree_grows_with_phi(self):
        bc = BoundaryConditionLambda(beta1=1.0, beta1p=1.0, phi=(0.0, 0.0, 1.0))
        problem = problem_on(0.0, 1.0, m=200, bc_right_lambda=bc)
        pair = build_pair(problem, 20)
        assert characteristic_series(problem, pair).N == 22

    def test_requires_dirichlet_left_end(self):
        bc = BoundaryConditionLambda(beta1=1.0, phi=(0.0, 1.0))
        problem = problem_on(
            0.0, 1.0, m=200, bc=BoundaryConditionUnmixed(alpha=0.3), bc_right_lambda=bc
        )
        pair = build_pair(problem, 10)
        with pytest.raises(UnsupportedBoundaryConditionError):
            characteristic_series(problem, pair)

    def test_beta_coefficients_cannot_both_vanish(self):
        with pytest.raises(ValueError):
            BoundaryConditionLambda(beta1=0.0, beta2=0.0)


class TestMergeRoots:
    def test_keeps_better_estimate(self):
        from spps.core.models import Root

        settings = RootFindConfig()
        coarse = Root(value=1.0 + 1e-10j, residual=1e-9, stable=True, error_estimate=1e-8)
        fine = Root(value=1.0 + 0j, residual=1e-14, stable=True, error_estimate=1e-13)
        other = Root(value=4.0 + 0j, residual=1e-14, stable=True, error_estimate=1e-13)
        merged = merge_roots([coarse], [fine, other], settings)
        assert len(merged) == 2
        assert merged[0] is fine

    def test_disagreeing_centers_keep_the_nearer_estimate(self):
        from spps.core.models import Root

        settings = RootFindConfig()
        far = Root(value=100.0 + 0j, residual=1e-9, stable=True, error_estimate=1e-7, center=0.0)
        near = Root(
            value=100.0 + 2e-7 + 0j, residual=1e-14, stable=True, error_estimate=1e-8, center=81.0
        )
        merged = merge_roots([far], [near], settings)
        assert merged == [near]
        assert merge_roots([near], [far], settings) == [near]


class TestQuadraticSpectralParameter:
    def test_nonreal_eigenvalues_from_boundary_condition(self):
        # u(pi) = -lambda^2 u(pi) adds lambda = +-i to the Dirichlet squares
        bc = BoundaryConditionLambda(beta1=1.0, beta1p=-1.0, phi=(0.0, 0.0, 1.0))
        problem = problem_on(0.0, math.pi, m=3000, bc_right_lambda=bc)
        result = solve(problem, N=100, shifts=0)
        values = result.values
        assert np.min(np.abs(values - 1j)) < 1e-8
        assert np.min(np.abs(values + 1j)) < 1e-8
        for n in (1, 2, 3):
            assert np.min(np.abs(values - n * n)) < 1e-7
