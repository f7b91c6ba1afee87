"""
Pydantic models for SPPS configuration.

Provides type-safe, validated configuration with clear error messages
and automatic validation of all numeric knobs and problem parameters.
"""

import math
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from spps.exceptions import ConfigurationError

COMMANDS = ("sl", "hill", "well", "layer", "zs")


class NumericsConfig(BaseModel):
    """Grid and truncation knobs shared by every command."""

    m: int = Field(default=2000, ge=8, description="Number of grid subintervals (m+1 nodes).")
    N: int = Field(default=120, ge=1, le=400, description="Truncation order of the series.")
    quadrature: str = Field(
        default="spline", description="Cumulative quadrature: spline (default) or simpson."
    )
    tail_tolerance: float = Field(
        default=1e-12,
        gt=0.0,
        description="Relative size of the last series term above which a homogeneous pair is rejected.",
    )

    @field_validator("quadrature")
    @classmethod
    def validate_quadrature(cls, v: str) -> str:
        """Validate quadrature scheme."""
        allowed = {"spline", "simpson"}
        if v not in allowed:
            raise ValueError(f"quadrature must be one of {allowed}, got: {v}")
        return v


class RootFindConfig(BaseModel):
    """Tolerances for polynomial root localization and filtering."""

    method: str = Field(default="companion", description="Global root localization method.")
    tol_res: float = Field(
        default=1e-6, gt=0.0, description="Relative residual |k(l)| / sum|a_k||l-c|^k accepted."
    )
    tol_stab: float = Field(
        default=1e-6,
        gt=0.0,
        description="Relative movement allowed when the truncation order is lowered.",
    )
    trust_tail_ratio: float = Field(
        default=1e-10,
        gt=0.0,
        lt=1.0,
        description="Trust radius: |a_N| r^N below this fraction of the largest term.",
    )
    dedupe_tol: float = Field(
        default=1e-8, gt=0.0, description="Roots closer than dedupe_tol*(1+|l|) are merged."
    )
    newton_max_iter: int = Field(default=40, ge=1, description="Newton iteration cap.")
    newton_tol: float = Field(default=1e-14, gt=0.0, description="Newton step tolerance.")
    scan_points: int = Field(
        default=512, ge=8, description="Subintervals of the real-axis sign scan."
    )
    coefficient_noise: float = Field(
        default=1e-15,
        gt=0.0,
        description="Relative noise level assumed in computed coefficients (error estimates).",
    )
    accept_tol: float = Field(
        default=1e-8,
        gt=0.0,
        description="Estimated relative root error below which a root is harvested.",
    )
    relaxed_tol: float = Field(
        default=1e-2,
        gt=0.0,
        description="Estimated relative root error accepted when choosing a shift center.",
    )
    imag_tol: float = Field(
        default=1e-8, gt=0.0, description="|Im l| below imag_tol*(1+|l|) counts as real."
    )
    max_shifts: int = Field(default=3, ge=0, description="Maximum recentring rounds.")

    @field_validator("method")
    @classmethod
    def validate_method(cls, v: str) -> str:
        """Validate root localization method."""
        allowed = {"companion"}
        if v not in allowed:
            raise ValueError(f"method must be one of {allowed}, got: {v}")
        return v


class SLConfig(BaseModel):
    """Regular Sturm-Liouville problem (pu')' + qu = lru on [a, b]."""

    a: float = Field(default=0.0, description="Left endpoint.")
    b: float = Field(default=math.pi, description="Right endpoint.")
    p: float | str = Field(default=-1.0, description="Constant or 'file:PATH'.")
    q: float | str = Field(default=0.0, description="Constant or 'file:PATH'.")
    r: float | str = Field(default=1.0, description="Constant or 'file:PATH'.")
    alpha: float = Field(default=0.0, description="Left angle: u(a)cos(a)+u'(a)sin(a)=0.")
    beta: float = Field(default=0.0, description="Right angle for unmixed conditions.")
    lambda_bc: dict[str, Any] | None = Field(
        default=None,
        description="Right condition b1 u - b2 u' = phi(l)(b1' u - b2' u'); "
        "keys beta1, beta2, beta1p, beta2p, phi (ascending coefficients).",
    )
    search: str | list[float] = Field(
        default="none",
        description="Root region: none, right_half_plane, or [lo, hi] on the real axis.",
    )

    @model_validator(mode="after")
    def validate_interval(self) -> "SLConfig":
        """Validate interval orientation and search region."""
        if self.b <= self.a:
            raise ValueError(f"b ({self.b}) must be > a ({self.a})")
        if isinstance(self.search, str) and self.search not in {"none", "right_half_plane"}:
            raise ValueError(f"search must be none, right_half_plane or [lo, hi], got: {self.search}")
        if isinstance(self.search, list) and len(self.search) != 2:
            raise ValueError(f"search interval needs two endpoints, got: {self.search}")
        return self


class HillConfig(BaseModel):
    """Periodic problem -(pf')' + qf = lf on one period."""

    potential: str = Field(default="mathieu", description="mathieu, razavy, free or 'file:PATH'.")
    r: float = Field(default=1.0, description="Mathieu strength in q = 2r cos 2x.")
    xi: float = Field(default=1.0, gt=0.0, description="Razavy parameter.")
    period: float = Field(default=math.pi, gt=0.0, description="Period T for file/free potentials.")
    count: int = Field(default=11, ge=1, description="Number of band edges to report.")
    curve: list[float] | None = Field(
        default=None, description="Optional [lo, hi, samples] for a D(l) export."
    )
    partner: bool = Field(default=False, description="Also build the SUSY partner discriminant.")

    @field_validator("curve")
    @classmethod
    def validate_curve(cls, v: list[float] | None) -> list[float] | None:
        """Validate discriminant curve specification."""
        if v is not None and (len(v) != 3 or v[1] <= v[0] or v[2] < 2):
            raise ValueError(f"curve must be [lo, hi, samples] with lo < hi, samples >= 2, got: {v}")
        return v


class WellConfig(BaseModel):
    """Quantum well: constant alpha1 (x<0), q on [0,h], constant alpha2 (x>h)."""

    potential: str = Field(default="sech2", description="sech2, square, gauss or 'file:PATH'.")
    depth: float = Field(default=12.0, description="Well strength (sech2: upsilon).")
    half_width: float = Field(default=5.0, gt=0.0, description="Truncation radius a (h = 2a).")
    width: float = Field(default=1.0, gt=0.0, description="Width of square/gauss wells.")
    alpha1: float = Field(default=0.0, description="Potential level for x < 0.")
    alpha2: float = Field(default=0.0, description="Potential level for x > h.")


class LayerConfig(BaseModel):
    """Inhomogeneous layer between two homogeneous media."""

    profile: str = Field(
        default="linear", description="homogeneous, linear, exponential, sinusoidal or 'file:PATH'."
    )
    n1: float = Field(default=1.0, gt=0.0, description="Ambient index (x < 0).")
    n2: float = Field(default=1.5, gt=0.0, description="Substrate index (x > d).")
    d: float = Field(default=1.0, gt=0.0, description="Layer thickness.")
    n_start: float = Field(default=1.2, gt=0.0, description="Index at x = 0 for graded profiles.")
    n_end: float = Field(default=1.8, gt=0.0, description="Index at x = d for graded profiles.")
    amplitude: float = Field(default=0.1, description="Sinusoidal grading amplitude.")
    k: float = Field(default=10.0, gt=0.0, description="Free-space wavenumber.")
    thetas: str | list[float] = Field(
        default="0:60:1", description="Incidence angles in degrees: 'start:stop:step' or a list."
    )
    polarization: str = Field(default="s", description="s or p.")

    @field_validator("polarization")
    @classmethod
    def validate_polarization(cls, v: str) -> str:
        """Validate polarization."""
        allowed = {"s", "p"}
        if v not in allowed:
            raise ValueError(f"polarization must be one of {allowed}, got: {v}")
        return v

    @field_validator("thetas")
    @classmethod
    def validate_thetas(cls, v: str | list[float]) -> str | list[float]:
        """Validate that the angle specification parses."""
        parse_theta_range(v)
        return v

    def theta_degrees(self) -> list[float]:
        return parse_theta_range(self.thetas)


class ZSConfig(BaseModel):
    """Zakharov-Shabat potential supported on [-a, a]."""

    potential: str = Field(default="box", description="box, gaussian, sech or 'file:PATH'.")
    A: float = Field(default=1.0, description="Potential amplitude.")
    a: float = Field(default=1.0, gt=0.0, description="Half-width of the support.")
    sigma: float = Field(default=0.3, gt=0.0, description="Width of gaussian/sech profiles.")
    eigenvectors: bool = Field(default=False, description="Also export eigenvector profiles.")


class OutputConfig(BaseModel):
    """Where results are written."""

    directory: str = Field(default="output", description="Output directory for CSV files.")
    report: bool = Field(default=True, description="Write run_report.json next to the CSVs.")


class LoggingConfig(BaseModel):
    """Configuration for logging."""

    level: str = Field(default="INFO", description="Logging level.")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log message format.",
    )
    file: str | None = Field(default=None, description="Optional log file path.")

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """Validate logging level."""
        allowed = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        v_upper = v.upper()
        if v_upper not in allowed:
            raise ValueError(f"level must be one of {allowed}, got: {v}")
        return v_upper


_NUMERIC_KEYS = {"m", "N", "quadrature", "tail_tolerance"}
_SECTION_KEYS = {"numerics", "rootfind", "output", "logging", *COMMANDS}


class RunConfig(BaseModel):
    """Main SPPS run configuration."""

    command: str | None = Field(default=None, description="sl, hill, well, layer or zs.")
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    rootfind: RootFindConfig = Field(default_factory=RootFindConfig)
    sl: SLConfig = Field(default_factory=SLConfig)
    hill: HillConfig = Field(default_factory=HillConfig)
    well: WellConfig = Field(default_factory=WellConfig)
    layer: LayerConfig = Field(default_factory=LayerConfig)
    zs: ZSConfig = Field(default_factory=ZSConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    model_config = {
        "extra": "ignore",  # Allow unknown fields for forward compatibility
        "validate_assignment": True,  # Validate on attribute assignment
    }

    @model_validator(mode="before")
    @classmethod
    def lift_flat_keys(cls, data: Any) -> Any:
        """Accept flat configs such as {command: hill, potential: mathieu, N: 100}."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        command = data.get("command")
        numerics = dict(data.get("numerics") or {})
        section = dict(data.get(command) or {}) if command in COMMANDS else None
        rootfind = dict(data.get("rootfind") or {})

        for key in list(data):
            if key in _SECTION_KEYS or key == "command":
                continue
            if key in _NUMERIC_KEYS:
                numerics[key] = data.pop(key)
            elif key == "shifts":
                rootfind["max_shifts"] = data.pop(key)
            elif section is not None:
                section[key] = data.pop(key)

        data["numerics"] = numerics
        data["rootfind"] = rootfind
        if section is not None:
            data[command] = section
        return data

    @field_validator("command")
    @classmethod
    def validate_command(cls, v: str | None) -> str | None:
        """Validate command name."""
        if v is not None and v not in COMMANDS:
            raise ValueError(f"command must be one of {set(COMMANDS)}, got: {v}")
        return v


def parse_theta_range(spec: str | list[float]) -> list[float]:
    """Parse 'start:stop:step' (inclusive stop) or a list of angles in degrees."""
    if isinstance(spec, list):
        values = [float(v) for v in spec]
    else:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"thetas must look like 'start:stop:step', got: {spec}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"thetas needs step > 0 and stop >= start, got: {spec}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    for v in values:
        if not 0.0 <= v < 90.0:
            raise ValueError(f"incidence angles must lie in [0, 90) degrees, got: {v}")
    return values


def _find_key_line(node: yaml.Node | None, loc: tuple) -> int | None:
    """Return the 1-based line of the YAML key addressed by a pydantic error location."""
    if node is None:
        return None
    current = node
    for part in loc:
        if not isinstance(current, yaml.MappingNode):
            break
        match = next((v for k, v in current.value if k.value == str(part)), None)
        if match is None:
            break
        line = next(k for k, v in current.value if v is match).start_mark.line + 1
        if part == loc[-1]:
            return line
        current = match
    # flat keys are lifted into sections; fall back to a search by name
    name = str(loc[-1]) if loc else None
    stack = [node]
    while stack and name is not None:
        item = stack.pop()
        if isinstance(item, yaml.MappingNode):
            for k, v in item.value:
                if k.value == name:
                    return k.start_mark.line + 1
                stack.append(v)
    return None


def load_config(config_file: str | Path = "config/config.yaml") -> RunConfig:
    """
    Load and validate SPPS configuration from a YAML file.

    Args:
        config_file: Path to YAML configuration file

    Returns:
        Validated RunConfig instance

    Raises:
        ConfigurationError: If the file is missing, is not valid YAML, or fails
            validation. The offending line is reported when it can be located.
    """
    config_path = Path(config_file)

    if not config_path.exists():
        raise ConfigurationError(f"Configuration file not found: {config_file}")

    text = config_path.read_text()
    try:
        config_dict = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigurationError(f"Failed to parse YAML configuration: {e}", line=line) from e

    if config_dict is None:
        config_dict = {}
    if not isinstance(config_dict, dict):
        raise ConfigurationError("Configuration root must be a mapping", line=1)

    try:
        return RunConfig(**config_dict)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first.get("loc", ()))
        where = ".".join(str(p) for p in loc)
        raise ConfigurationError(
            f"Invalid configuration at '{where}': {first.get('msg')}",
            line=_find_key_line(root, loc),
        ) from e


def save_config(config: RunConfig, config_file: str | Path = "config/config.yaml") -> None:
    """
    Save SPPS configuration to a YAML file.

    Args:
        config: RunConfig instance to save
        config_file: Path to YAML configuration file
    """
    config_path = Path(config_file)
    config_path.parent.mkdir(parents=True, exist_ok=True)

    config_dict = config.model_dump(exclude_none=True)

    with open(config_path, "w") as f:
        yaml.dump(config_dict, f, default_flow_style=False, sort_keys=False)
