import math

import numpy as np
import pytest

from spps.config.models import (
    HillConfig,
    LayerConfig,
    NumericsConfig,
    SLConfig,
    WellConfig,
    ZSConfig,
)
from spps.core.models import RegionKind
from spps.exceptions import ConfigurationError
from spps.profiles import (
    hill_from_config,
    is_file_spec,
    layer_from_config,
    layer_index,
    load_samples,
    razavy,
    razavy_exact,
    resolve,
    sl_from_config,
    well_from_config,
    zs_from_config,
)

NUMERICS = NumericsConfig(m=200, N=20)


class TestSampleFiles:
    def test_load_and_interpolate(self, sample_file):
        samples = load_samples(sample_file)
        assert samples.start == 0.0
        assert samples.stop == pytest.approx(math.pi)
        assert samples(1.0) == pytest.approx(math.sin(1.0), abs=1e-7)

    def test_whitespace_delimited(self, temp_dir):
        path = temp_dir / "ws.dat"
        path.write_text("# x y\n0 0\n1 1\n2 4\n3 9\n4 16\n")
        assert load_samples(path)(2.5) == pytest.approx(6.25)

    def test_missing_file(self, temp_dir):
        with pytest.raises(ConfigurationError, match="not found"):
            load_samples(temp_dir / "none.csv")

    def test_too_few_rows(self, temp_dir):
        path = temp_dir / "short.csv"
        path.write_text("0,1\n1,2\n")
        with pytest.raises(ConfigurationError, match="at least 4 rows"):
            load_samples(path)

    def test_x_must_increase(self, temp_dir):
        path = temp_dir / "bad.csv"
        path.write_text("0,1\n2,2\n1,3\n3,4\n")
        with pytest.raises(ConfigurationError, match="strictly increasing"):
            load_samples(path)

    def test_resolve(self, sample_file):
        assert resolve("2.5") == 2.5
        assert is_file_spec(f"file:{sample_file}")
        assert callable(resolve(f"file:{sample_file}"))
        with pytest.raises(ConfigurationError):
            resolve("linear")


class TestBuilders:
    def test_razavy_edges_in_closed_form(self):
        assert razavy_exact(1.0)[0] == pytest.approx(2 * (1 - math.sqrt(2)))
        assert razavy(2.0)(0.0) == pytest.approx(-6.0)

    def test_hill_builders(self, sample_file):
        assert hill_from_config(HillConfig(potential="mathieu", r=2.0), NUMERICS).q.at(0) == 4.0
        free = hill_from_config(HillConfig(potential="free", period=2.0), NUMERICS)
        assert free.period == 2.0
        from_file = hill_from_config(HillConfig(potential=f"file:{sample_file}"), NUMERICS)
        assert from_file.period == pytest.approx(math.pi)
        with pytest.raises(ConfigurationError):
            hill_from_config(HillConfig(potential="lame"), NUMERICS)

    def test_well_builders(self):
        well = well_from_config(WellConfig(potential="sech2", depth=12, half_width=5), NUMERICS)
        assert well.h == 10.0
        assert well.q.at(NUMERICS.m // 2).real == pytest.approx(-12.0)
        square = well_from_config(WellConfig(potential="square", depth=3, width=2), NUMERICS)
        assert square.q.at(0) == 0
        with pytest.raises(ConfigurationError):
            well_from_config(WellConfig(potential="morse"), NUMERICS)

    @pytest.mark.parametrize("profile", ["homogeneous", "linear", "exponential", "sinusoidal"])
    def test_layer_profiles_hit_end_values(self, profile):
        cfg = LayerConfig(profile=profile, n_start=1.2, n_end=1.8, d=2.0)
        layer = layer_from_config(cfg, NUMERICS)
        assert layer.d == 2.0
        assert layer.n.at(0).real == pytest.approx(1.2)
        if profile != "homogeneous":
            assert layer.n.at(NUMERICS.m).real == pytest.approx(1.8)

    def test_layer_profile_must_stay_positive(self):
        cfg = LayerConfig(profile="sinusoidal", n_start=0.1, n_end=0.1, amplitude=1.0)
        with pytest.raises(ConfigurationError):
            layer_from_config(cfg, NUMERICS)

    def test_unknown_layer_profile(self):
        with pytest.raises(ConfigurationError):
            layer_index(LayerConfig(profile="parabolic"))

    def test_zs_builders(self, temp_dir):
        box = zs_from_config(ZSConfig(potential="box", A=2.0, a=0.5), NUMERICS)
        assert box.area() == pytest.approx(2.0)
        sech = zs_from_config(ZSConfig(potential="sech", A=1.0, sigma=1.0, a=3.0), NUMERICS)
        assert sech.U.at(NUMERICS.m // 2).real == pytest.approx(1.0)
        path = temp_dir / "asym.csv"
        x = np.linspace(-1.0, 2.0, 10)
        np.savetxt(path, np.column_stack([x, x]), delimiter=",")
        with pytest.raises(ConfigurationError, match="symmetric"):
            zs_from_config(ZSConfig(potential=f"file:{path}"), NUMERICS)

    def test_sl_builder(self):
        problem = sl_from_config(SLConfig(search=[0.0, 10.0], q=2.0), NUMERICS)
        assert problem.search.kind is RegionKind.INTERVAL
        assert problem.coeffs.q.at(0) == 2.0
        assert problem.bc_right_lambda is None

    def test_sl_builder_lambda_bc(self):
        cfg = SLConfig(lambda_bc={"beta1": 1.0, "beta1p": -1.0, "phi": [0, 0, 1]})
        assert sl_from_config(cfg, NUMERICS).bc_right_lambda.phi == (0j, 0j, 1 + 0j)
        with pytest.raises(ConfigurationError, match="lambda_bc"):
            sl_from_config(SLConfig(lambda_bc={"gamma": 1.0}), NUMERICS)

    def test_sl_file_must_cover_interval(self, sample_file):
        cfg = SLConfig(a=0.0, b=4.0, q=f"file:{sample_file}")
        with pytest.raises(ConfigurationError, match="covers"):
            sl_from_config(cfg, NUMERICS)
