"""Reproduction of the published tables against versioned reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from spps.config.models import (
    HillConfig,
    NumericsConfig,
    RootFindConfig,
    WellConfig,
    ZSConfig,
)
from spps.exceptions import ConfigurationError
from spps.profiles import hill_from_config, well_from_config, zs_from_config
from spps.spectral.hill import solve_hill
from spps.spectral.schrodinger_line import solve_well
from spps.spectral.zakharov_shabat import zs_eigenvalues
from spps.utils.csv_writer import write_csv
from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)

REFERENCE_FILE = Path(__file__).parent / "reference_values.yaml"
CSV_HEADER = ("n", "computed", "reference", "abs_error")


@dataclass
class ReferenceRow:
    """One reference value with its tolerance and provenance."""

    n: int
    value: float
    tolerance: float
    source: str = ""
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class ComparisonRow:
    n: int
    computed: float
    reference: float
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.computed) and self.abs_error <= self.tolerance


@dataclass
class ReproductionResult:
    """Outcome of reproducing one table."""

    table_id: str
    title: str
    rows: list[ComparisonRow] = field(default_factory=list)
    count_mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows) and not self.count_mismatches

    @property
    def failures(self) -> list[ComparisonRow]:
        return [r for r in self.rows if not r.passed]

    @property
    def max_error(self) -> float:
        errors = [r.abs_error for r in self.rows if math.isfinite(r.computed)]
        return max(errors) if errors else math.inf

    def csv_rows(self) -> list[tuple]:
        return [(r.n, r.computed, r.reference, r.abs_error) for r in self.rows]


def load_references(path: str | Path = REFERENCE_FILE) -> dict[str, dict[str, Any]]:
    """Table id -> table entry (knobs plus ``rows``) from the reference file."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot read reference values from {path}: {e}") from e
    return {str(k): v for k, v in (data or {}).get("tables", {}).items()}


def table_ids(path: str | Path = REFERENCE_FILE) -> list[str]:
    return list(load_references(path))


def _rows(entry: dict[str, Any]) -> list[ReferenceRow]:
    rows = []
    for raw in entry["rows"]:
        raw = dict(raw)
        rows.append(
            ReferenceRow(
                n=int(raw.pop("n")),
                value=float(raw.pop("value")),
                tolerance=float(raw.pop("tolerance")),
                source=str(raw.pop("source", "")),
                params=raw,
            )
        )
    return rows


def _pick(values: list[float], n: int) -> float:
    return values[n] if n < len(values) else math.nan


def _numerics(entry: dict[str, Any]) -> NumericsConfig:
    return NumericsConfig(m=entry.get("m", 2000), N=entry.get("N", 120))


def _hill_values(entry: dict[str, Any], settings: RootFindConfig) -> list[float]:
    numerics = _numerics(entry)
    cfg = HillConfig(
        potential=entry["potential"],
        r=entry.get("r", 1.0),
        xi=entry.get("xi", 1.0),
        count=entry.get("count", 11),
    )
    problem = hill_from_config(cfg, numerics)
    result = solve_hill(problem, numerics.N, cfg.count, settings, numerics)
    return result.edges.values


def _well_values(entry: dict[str, Any], settings: RootFindConfig) -> list[float]:
    numerics = _numerics(entry)
    cfg = WellConfig(
        potential=entry["potential"], depth=entry["depth"], half_width=entry["half_width"]
    )
    return solve_well(well_from_config(cfg, numerics), numerics.N, settings, numerics).eigenvalues


def _zs_values(entry: dict[str, Any], A: float, settings: RootFindConfig) -> list[float]:
    numerics = _numerics(entry)
    cfg = ZSConfig(potential=entry["potential"], A=A, a=entry.get("a", 1.0))
    spectrum = zs_eigenvalues(zs_from_config(cfg, numerics), numerics.N, settings, numerics)
    return [float(v) for v in spectrum.real_values()]


def reproduce(
    table_id: str,
    out_dir: str | Path | None = None,
    settings: RootFindConfig | None = None,
    references: dict[str, dict[str, Any]] | None = None,
) -> ReproductionResult:
    """
    Run the solver behind ``table_id`` with its published knobs and compare.

    Writes ``table_<id>.csv`` (n, computed, reference, abs_error) when
    ``out_dir`` is given.

    Raises:
        ConfigurationError: If the table id is unknown
    """
    settings = settings or RootFindConfig()
    references = references if references is not None else load_references()
    if table_id not in references:
        raise ConfigurationError(
            f"Unknown table id {table_id!r}; expected one of {sorted(references)}"
        )
    entry = references[table_id]
    rows = _rows(entry)
    result = ReproductionResult(table_id=table_id, title=entry.get("title", table_id))
    logger.info(f"Reproducing table {table_id}: {result.title}")

    command = entry["command"]
    if command == "zs":
        by_amplitude: dict[float, list[float]] = {}
        for row in rows:
            A = float(row.params["A"])
            if A not in by_amplitude:
                by_amplitude[A] = _zs_values(entry, A, settings)
            computed = _pick(by_amplitude[A], row.n)
            result.rows.append(ComparisonRow(row.n, computed, row.value, row.tolerance))
        for A, values in by_amplitude.items():
            expected = sum(1 for row in rows if float(row.params["A"]) == A)
            if len(values) != expected:
                message = f"Box A={A}: found {len(values)} eigenvalue(s), expected {expected}"
                logger.warning(message)
                result.count_mismatches.append(message)
    else:
        if command == "hill":
            values = _hill_values(entry, settings)
        elif command == "well":
            values = _well_values(entry, settings)
        else:
            raise ConfigurationError(f"Table {table_id} names unsupported command {command!r}")
        result.rows = [
            ComparisonRow(row.n, _pick(values, row.n), row.value, row.tolerance) for row in rows
        ]

    for row in result.failures:
        logger.warning(
            f"Table {table_id} row {row.n}: |{row.computed:.12g} - {row.reference:.12g}| "
            f"exceeds {row.tolerance:g}"
        )
    if out_dir is not None:
        safe_id = table_id.replace(".", "_")
        write_csv(Path(out_dir) / f"table_{safe_id}.csv", CSV_HEADER, result.csv_rows())
    logger.info(
        f"Table {table_id}: {'PASS' if result.passed else 'FAIL'} "
        f"(max abs error {result.max_error:.3e})"
    )
    return result
