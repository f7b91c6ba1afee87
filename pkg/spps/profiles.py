"""
Named coefficient profiles and the two-column sample-file loader.

Every problem section of the configuration names either a built-in profile
(with its parameters) or ``file:PATH``; the ``*_from_config`` builders turn a
section into the sampled problem object of the matching solver.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from spps.config.models import (
    HillConfig,
    LayerConfig,
    NumericsConfig,
    SLConfig,
    WellConfig,
    ZSConfig,
)
from spps.core.grid import make_grid, sample
from spps.core.models import RootConstraint
from spps.core.spps_core import SLCoefficients
from spps.exceptions import ConfigurationError
from spps.spectral.hill import PeriodicProblem
from spps.spectral.schrodinger_line import WellPotential
from spps.spectral.sl_spectral import BoundaryConditionLambda, BoundaryConditionUnmixed, SLProblem
from spps.spectral.transmission import LayerProfile
from spps.spectral.zakharov_shabat import ZSPotential
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

FILE_PREFIX = "file:"


@dataclass(frozen=True)
class SampledProfile:
    """Cubic-spline interpolant of a two-column (x, value) sample file."""

    path: Path
    spline: CubicSpline

    @property
    def start(self) -> float:
        return float(self.spline.x[0])

    @property
    def stop(self) -> float:
        return float(self.spline.x[-1])

    def __call__(self, x):
        return self.spline(x)


def load_samples(path: str | Path) -> SampledProfile:
    """
    Read x, value columns (comma or whitespace separated, '#' comments).

    Raises:
        ConfigurationError: If the file is missing or not two increasing columns
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Sample file not found: {path}")
    text = path.read_text()
    delimiter = "," if "," in text else None
    try:
        data = np.loadtxt(path, delimiter=delimiter, comments="#", ndmin=2)
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse sample file {path}: {e}") from e
    if data.shape[1] != 2 or data.shape[0] < 4:
        raise ConfigurationError(
            f"Sample file {path} needs two columns and at least 4 rows, got shape {data.shape}"
        )
    x, y = data[:, 0], data[:, 1]
    if np.any(np.diff(x) <= 0):
        raise ConfigurationError(f"x column of {path} must be strictly increasing")
    logger.debug(f"Loaded {x.size} samples from {path} on [{x[0]}, {x[-1]}]")
    return SampledProfile(path=path, spline=CubicSpline(x, y, bc_type="not-a-knot"))


def is_file_spec(spec) -> bool:
    return isinstance(spec, str) and spec.startswith(FILE_PREFIX)


def resolve(spec: float | str) -> Callable | float:
    """A constant or the interpolant of ``file:PATH``."""
    if is_file_spec(spec):
        return load_samples(spec[len(FILE_PREFIX) :])
    try:
        return float(spec)
    except ValueError as e:
        raise ConfigurationError(f"Expected a number or '{FILE_PREFIX}PATH', got: {spec}") from e


# Periodic potentials


def mathieu(r: float) -> Callable:
    """q(x) = 2 r cos 2x, period pi."""
    return lambda x: 2.0 * r * np.cos(2.0 * x)


def razavy(xi: float) -> Callable:
    """q(x) = xi^2/8 (1 - cos 4x) - 3 xi cos 2x, period pi."""
    return lambda x: xi * xi / 8.0 * (1.0 - np.cos(4.0 * x)) - 3.0 * xi * np.cos(2.0 * x)


def razavy_exact(xi: float) -> dict[int, float]:
    """Closed-form band edges lambda0, lambda3, lambda4 of the Razavy potential."""
    root = math.sqrt(1.0 + xi * xi)
    return {0: 2.0 * (1.0 - root), 3: 4.0, 4: 2.0 * (1.0 + root)}


def hill_from_config(cfg: HillConfig, numerics: NumericsConfig) -> PeriodicProblem:
    if cfg.potential == "mathieu":
        return PeriodicProblem.from_functions(mathieu(cfg.r), math.pi, numerics.m)
    if cfg.potential == "razavy":
        return PeriodicProblem.from_functions(razavy(cfg.xi), math.pi, numerics.m)
    if cfg.potential == "free":
        return PeriodicProblem.from_functions(0.0, cfg.period, numerics.m)
    if is_file_spec(cfg.potential):
        samples = load_samples(cfg.potential[len(FILE_PREFIX) :])
        period = samples.stop - samples.start
        return PeriodicProblem.from_functions(
            lambda x: samples(x + samples.start), period, numerics.m
        )
    raise ConfigurationError(f"Unknown periodic potential: {cfg.potential}")


# Quantum wells on [0, h]


def sech2_well(depth: float, half_width: float) -> Callable:
    """-depth sech^2(x - a) on [0, 2a]."""
    return lambda x: -depth / np.cosh(x - half_width) ** 2


def square_well(depth: float, width: float, half_width: float) -> Callable:
    return lambda x: np.where(np.abs(x - half_width) <= width / 2.0, -depth, 0.0)


def gauss_well(depth: float, width: float, half_width: float) -> Callable:
    return lambda x: -depth * np.exp(-(((x - half_width) / width) ** 2))


def well_from_config(cfg: WellConfig, numerics: NumericsConfig) -> WellPotential:
    h = 2.0 * cfg.half_width
    if cfg.potential == "sech2":
        q = sech2_well(cfg.depth, cfg.half_width)
    elif cfg.potential == "square":
        q = square_well(cfg.depth, cfg.width, cfg.half_width)
    elif cfg.potential == "gauss":
        q = gauss_well(cfg.depth, cfg.width, cfg.half_width)
    elif is_file_spec(cfg.potential):
        samples = load_samples(cfg.potential[len(FILE_PREFIX) :])
        h = samples.stop - samples.start
        q = lambda x: samples(x + samples.start)  # noqa: E731
    else:
        raise ConfigurationError(f"Unknown well potential: {cfg.potential}")
    return WellPotential.from_function(q, h, numerics.m, cfg.alpha1, cfg.alpha2)


# Graded layers on [0, d]


def layer_index(cfg: LayerConfig) -> tuple[Callable | float, float]:
    """Index profile n(x) and thickness for a layer section."""
    d, start, end = cfg.d, cfg.n_start, cfg.n_end
    if cfg.profile == "homogeneous":
        return start, d
    if cfg.profile == "linear":
        return (lambda x: start + (end - start) * x / d), d
    if cfg.profile == "exponential":
        return (lambda x: start * (end / start) ** (x / d)), d
    if cfg.profile == "sinusoidal":
        ramp = end - start
        return (lambda x: start + ramp * x / d + cfg.amplitude * np.sin(2 * np.pi * x / d)), d
    if is_file_spec(cfg.profile):
        samples = load_samples(cfg.profile[len(FILE_PREFIX) :])
        return (lambda x: samples(x + samples.start)), samples.stop - samples.start
    raise ConfigurationError(f"Unknown layer profile: {cfg.profile}")


def layer_from_config(cfg: LayerConfig, numerics: NumericsConfig) -> LayerProfile:
    n, d = layer_index(cfg)
    try:
        return LayerProfile.from_function(n, d, cfg.n1, cfg.n2, numerics.m, cfg.polarization)
    except ValueError as e:
        raise ConfigurationError(f"Invalid layer profile: {e}") from e


# Zakharov-Shabat potentials on [-a, a]


def zs_from_config(cfg: ZSConfig, numerics: NumericsConfig) -> ZSPotential:
    A, a, sigma = cfg.A, cfg.a, cfg.sigma
    if cfg.potential == "box":
        return ZSPotential.box(A, a, numerics.m)
    if cfg.potential == "gaussian":
        return ZSPotential.from_function(lambda x: A * np.exp(-((x / sigma) ** 2)), a, numerics.m)
    if cfg.potential == "sech":
        return ZSPotential.from_function(lambda x: A / np.cosh(x / sigma), a, numerics.m)
    if is_file_spec(cfg.potential):
        samples = load_samples(cfg.potential[len(FILE_PREFIX) :])
        if not math.isclose(samples.start, -samples.stop, abs_tol=1e-12):
            raise ConfigurationError(
                "ZS sample file must cover a symmetric [-a, a], "
                f"got [{samples.start}, {samples.stop}]"
            )
        return ZSPotential.from_function(samples, samples.stop, numerics.m)
    raise ConfigurationError(f"Unknown ZS potential: {cfg.potential}")


# General Sturm-Liouville problems


def _coefficient(spec: float | str, grid):
    value = resolve(spec)
    if isinstance(value, SampledProfile):
        if value.start > grid.a + 1e-12 or value.stop < grid.b - 1e-12:
            raise ConfigurationError(
                f"{value.path} covers [{value.start}, {value.stop}], not [{grid.a}, {grid.b}]"
            )
    return sample(grid, value)


def sl_from_config(cfg: SLConfig, numerics: NumericsConfig) -> SLProblem:
    grid = make_grid(cfg.a, cfg.b, numerics.m)
    coeffs = SLCoefficients(
        p=_coefficient(cfg.p, grid), q=_coefficient(cfg.q, grid), r=_coefficient(cfg.r, grid)
    )
    if cfg.search == "none":
        search = RootConstraint.none()
    elif cfg.search == "right_half_plane":
        search = RootConstraint.right_half_plane()
    else:
        search = RootConstraint.interval(*cfg.search)
    bc_lambda = None
    if cfg.lambda_bc is not None:
        try:
            bc_lambda = BoundaryConditionLambda(**cfg.lambda_bc)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid lambda_bc: {e}") from e
    return SLProblem(
        coeffs=coeffs,
        bc=BoundaryConditionUnmixed(cfg.alpha, cfg.beta),
        bc_right_lambda=bc_lambda,
        search=search,
    )
