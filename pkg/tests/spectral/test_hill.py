import math

import numpy as np
import pytest

from spps.core.grid import make_grid, sample
from spps.profiles import mathieu, razavy, razavy_exact
from spps.spectral.hill import (
    DiscriminantSource,
    PeriodicProblem,
    bloch_solutions,
    discriminant_series,
    lowest_eigenvalue,
    nodeless_periodic_f0,
    sample_discriminant,
    solve_hill,
    susy_partner,
)

MATHIEU_R1 = [-0.45513860, -0.11024882, 1.85910807, 3.91702477, 4.37130098]


@pytest.fixture(scope="module")
def free_problem():
    return PeriodicProblem.from_functions(0.0, math.pi, m=1000)


@pytest.fixture(scope="module")
def mathieu_result():
    problem = PeriodicProblem.from_functions(mathieu(1.0), math.pi, m=2000)
    return problem, solve_hill(problem, N=100, count=5)


class TestPeriodicProblem:
    def test_rejects_nonpositive_p(self):
        with pytest.raises(ValueError, match="positive"):
            PeriodicProblem.from_functions(0.0, math.pi, m=100, p=lambda x: np.cos(x))

    def test_rejects_grid_not_starting_at_zero(self):
        grid = make_grid(1.0, 2.0, 50)
        with pytest.raises(ValueError):
            PeriodicProblem(p=sample(grid, 1.0), q=sample(grid, 0.0))

    def test_mean_q(self):
        problem = PeriodicProblem.from_functions(lambda x: 3.0 + np.cos(2 * x), math.pi, m=400)
        assert problem.mean_q() == pytest.approx(3.0, abs=1e-10)


class TestFreeDiscriminant:
    def test_lowest_eigenvalue_is_zero(self, free_problem):
        assert abs(lowest_eigenvalue(free_problem, N=60)) < 1e-9

    def test_discriminant_is_twice_cosine(self, free_problem):
        lambda0 = lowest_eigenvalue(free_problem, N=60)
        f0 = nodeless_periodic_f0(free_problem, lambda0, N=60)
        discriminant = discriminant_series(free_problem, f0, N=60)
        assert discriminant.source is DiscriminantSource.PERIODIC_F0
        assert discriminant.coeffs[0] == pytest.approx(2.0, abs=1e-9)
        lambdas = np.linspace(-5.0, 30.0, 36)
        expected = 2.0 * np.cos(np.sqrt(lambdas + 0j) * math.pi).real
        rows = sample_discriminant(discriminant, lambdas)
        np.testing.assert_allclose([d for _, d in rows], expected, atol=1e-8)

    def test_monodromy_has_unit_determinant(self, free_problem):
        f0 = nodeless_periodic_f0(free_problem, 0.0, N=60)
        discriminant = discriminant_series(free_problem, f0, N=60)
        for lam in (-2.0, 0.7, 6.3):
            assert abs(np.linalg.det(discriminant.monodromy_at(lam)) - 1.0) < 1e-9


class TestMathieu:
    def test_lowest_edge(self, mathieu_result):
        _, result = mathieu_result
        assert result.lambda0 == pytest.approx(MATHIEU_R1[0], abs=5e-6)

    def test_band_edges(self, mathieu_result):
        _, result = mathieu_result
        np.testing.assert_allclose(result.edges.values, MATHIEU_R1, atol=5e-6)
        assert result.edges.interlaced
        assert result.edges.periodic[0] == result.edges.values[0]
        assert len(result.edges.antiperiodic) == 2

    def test_f0_is_nodeless_and_periodic(self, mathieu_result):
        problem, result = mathieu_result
        f0 = result.f0.u0
        assert f0.min_abs() > 1e-3 * f0.max_abs()
        assert abs(f0.at(problem.grid.m) - f0.at(0)) < 1e-8 * f0.max_abs()

    def test_bloch_multipliers(self, mathieu_result):
        _, result = mathieu_result
        bloch = bloch_solutions(result.discriminant, 1.0)
        assert abs(bloch.beta_plus * bloch.beta_minus - 1.0) < 1e-8
        F = bloch.F_plus
        assert abs(F.at(F.grid.m) - bloch.beta_plus * F.at(0)) < 1e-7 * F.max_abs()
        xs, values = bloch.extend("plus", 3)
        assert xs[-1] == pytest.approx(3 * math.pi)
        assert values.size == 3 * F.grid.m + 1

    def test_susy_partner_shares_discriminant(self, mathieu_result):
        problem, result = mathieu_result
        partner = susy_partner(problem, result.f0, N=100)
        lambdas = np.linspace(-0.4, 5.0, 12)
        original = np.array([d for _, d in sample_discriminant(result.discriminant, lambdas)])
        shared = np.array([d for _, d in sample_discriminant(partner.discriminant, lambdas)])
        np.testing.assert_allclose(shared, original, atol=1e-5)
        assert partner.f0_tilde.u0.min_abs() > 0

    def test_edges_are_distinct(self, mathieu_result):
        _, result = mathieu_result
        assert np.all(np.diff(result.edges.values) > 1e-3)
        assert result.edges.values[0] == result.lambda0


class TestRazavy:
    @pytest.mark.parametrize("xi", [1.0, 2.0])
    def test_closed_form_edges(self, xi):
        problem = PeriodicProblem.from_functions(razavy(xi), math.pi, m=2000)
        result = solve_hill(problem, N=100, count=5)
        exact = razavy_exact(xi)
        values = result.edges.values
        assert len(values) == 5
        for n, value in exact.items():
            assert values[n] == pytest.approx(value, abs=1e-4)
        assert result.edges.interlaced


@pytest.mark.slow
class TestRangeExtension:
    def test_recentring_reaches_higher_edges(self):
        problem = PeriodicProblem.from_functions(mathieu(1.0), math.pi, m=2000)
        result = solve_hill(problem, N=100, count=9)
        expected = MATHIEU_R1 + [9.04773926, 9.07836885, 16.03297008, 16.03383234]
        np.testing.assert_allclose(result.edges.values, expected, atol=1e-4)
        assert result.edges.interlaced


class TestRandomizedProperties:
    def test_floquet_multipliers_multiply_to_one(self, mathieu_result, rng):
        _, result = mathieu_result
        for lam in rng.uniform(-1.0, 10.0, size=20):
            bloch = bloch_solutions(result.discriminant, float(lam))
            assert abs(bloch.beta_plus * bloch.beta_minus - 1.0) < 1e-8
            D = result.discriminant.evaluate(float(lam))
            assert abs(bloch.beta_plus + bloch.beta_minus - D) < 1e-8 * max(1.0, abs(D))

    def test_monodromy_is_unimodular(self, mathieu_result, rng):
        _, result = mathieu_result
        for lam in rng.uniform(-1.0, 6.0, size=20):
            assert abs(np.linalg.det(result.discriminant.monodromy_at(float(lam))) - 1.0) < 1e-8

    @pytest.mark.slow
    def test_lowest_edges_interlace(self, rng):
        for a, b in rng.uniform(0.5, 1.5, size=(20, 2)):
            problem = PeriodicProblem.from_functions(
                lambda x, a=a, b=b: a * np.cos(2 * x) + b * np.sin(4 * x), math.pi, m=600
            )
            result = solve_hill(problem, N=60, count=3)
            values = result.edges.values
            assert len(values) == 3
            assert result.edges.interlaced
            assert values[0] <= problem.mean_q() + 1e-9
            assert result.discriminant.evaluate(values[0]) == pytest.approx(2.0, abs=1e-6)
            assert result.discriminant.evaluate(values[1]) == pytest.approx(-2.0, abs=1e-6)
