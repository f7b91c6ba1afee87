"""Deterministic CSV output for spectra, discriminant curves and sweeps."""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

from spps.utils.logging_utils import get_logger

logger = get_logger(__name__)


def format_value(value) -> str:
    """Format one cell: floats as %.15g, booleans as 0/1, everything else via str."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, complex):
        raise TypeError("complex cells must be split into real and imaginary columns")
    if isinstance(value, float) or hasattr(value, "dtype"):
        return "%.15g" % float(value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write ``rows`` under ``header`` with LF line endings.

    Returns:
        The resolved output path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path
