import math

import numpy as np
import pytest

from spps.config.models import NumericsConfig
from spps.exceptions import AlphasNotEqualError, LambdaOutOfRangeError
from spps.profiles import sech2_well
from spps.spectral.schrodinger_line import (
    WellPotential,
    dispersion_series_general,
    dispersion_series_mu,
    parity,
    solve_well,
)


def flat_well_mismatch(lam, depth, half):
    """Distance of lambda from the even/odd conditions of a flat well of width 2*half."""
    k = math.sqrt(depth + lam)
    kappa = math.sqrt(-lam)
    even = k * math.tan(k * half) - kappa
    odd = -k / math.tan(k * half) - kappa
    return min(abs(even), abs(odd))


class TestFlatWell:
    def test_eigenvalues_satisfy_matching_conditions(self):
        well = WellPotential.from_function(-10.0, 2.0, m=1000)
        spectrum = solve_well(well, N=80)
        assert len(spectrum.eigenvalues) == 3
        for lam in spectrum.eigenvalues:
            assert flat_well_mismatch(lam, 10.0, 1.0) < 1e-7
        assert spectrum.search_interval == (-10.0, 0.0)

    def test_modes_alternate_parity(self):
        well = WellPotential.from_function(-10.0, 2.0, m=1000)
        spectrum = solve_well(well, N=80)
        assert [parity(mode) for mode in spectrum.modes] == [1, -1, 1]
        assert all(mode.matching_residual < 1e-8 for mode in spectrum.modes)
        assert not any(mode.suspect for mode in spectrum.modes)

    def test_equal_outer_levels_shift_spectrum(self):
        base = solve_well(WellPotential.from_function(-10.0, 2.0, m=1000), N=80)
        lifted = solve_well(
            WellPotential.from_function(-9.0, 2.0, m=1000, alpha1=1.0, alpha2=1.0), N=80
        )
        np.testing.assert_allclose(lifted.eigenvalues, np.array(base.eigenvalues) + 1.0, atol=1e-8)

    def test_mode_decays_outside(self):
        well = WellPotential.from_function(-10.0, 2.0, m=1000)
        mode = solve_well(well, N=80).modes[0]
        inside = mode(np.array([1.0]))[0]
        far = mode(np.array([-4.0, 6.0]))
        assert np.all(np.abs(far) < 1e-3 * abs(inside))

    def test_no_bound_states_for_positive_potential(self):
        well = WellPotential.from_function(1.0, 2.0, m=200)
        assert solve_well(well, N=30).eigenvalues == []


class TestUnequalOuterLevels:
    def test_scan_finds_roots_of_dispersion(self):
        well = WellPotential.from_function(-10.0, 2.0, m=1000, alpha1=0.0, alpha2=0.5)
        evaluator = dispersion_series_general(well, N=80)
        spectrum = solve_well(well, N=80)
        assert spectrum.eigenvalues
        for lam in spectrum.eigenvalues:
            assert -10.0 < lam < 0.0
            assert abs(evaluator(lam).real) < 1e-8 * (1 + evaluator.tail)

    def test_dispersion_out_of_range(self):
        well = WellPotential.from_function(-1.0, 1.0, m=100, alpha1=0.0, alpha2=0.5)
        evaluator = dispersion_series_general(well, N=20)
        with pytest.raises(LambdaOutOfRangeError):
            evaluator(0.1)

    def test_mu_series_needs_zero_levels(self):
        well = WellPotential.from_function(-1.0, 1.0, m=100, alpha1=0.0, alpha2=0.5)
        with pytest.raises(AlphasNotEqualError):
            dispersion_series_mu(well, N=20)


class TestValidation:
    def test_rejects_complex_potential(self):
        with pytest.raises(ValueError):
            WellPotential.from_function(1j, 1.0, m=50)


@pytest.mark.slow
class TestSech2Well:
    def test_reflectionless_bound_states(self):
        numerics = NumericsConfig(m=4000, N=180)
        well = WellPotential.from_function(sech2_well(12.0, 5.0), 10.0, m=numerics.m)
        spectrum = solve_well(well, numerics.N, numerics=numerics)
        np.testing.assert_allclose(spectrum.eigenvalues, [-9.0, -4.0, -1.0], atol=5e-4)
