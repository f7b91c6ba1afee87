import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from spps import __version__
from spps.config.models import COMMANDS, NumericsConfig, RunConfig, load_config
from spps.evaluation.reproduce import reproduce, table_ids
from spps.exceptions import ConfigurationError, SPPSError, ToleranceFailure
from spps.profiles import (
    hill_from_config,
    layer_from_config,
    sl_from_config,
    well_from_config,
    zs_from_config,
)
from spps.spectral.hill import sample_discriminant, solve_hill, susy_partner
from spps.spectral.schrodinger_line import parity, solve_well
from spps.spectral.sl_spectral import solve
from spps.spectral.transmission import sweep
from spps.spectral.zakharov_shabat import solve_zs
from spps.utils.csv_writer import write_csv
from spps.utils.logging_utils import get_logger, setup_logger
from spps.utils.run_recorder import RunRecorder

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to a YAML run configuration")
    common.add_argument("--out", help="Output directory (default: output.directory from config)")
    common.add_argument("--m", type=int, help="Grid subintervals (overrides the config)")
    common.add_argument("--N", type=int, help="Truncation order (overrides the config)")
    common.add_argument("--json", action="store_true", help="Print a JSON summary on stdout")
    common.add_argument(
        "--verbose", action="store_true", help="Enable verbose logging (DEBUG level)"
    )
    return common


def create_parser() -> argparse.ArgumentParser:
    """Create and return the argument parser."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        description="SPPS: spectral parameter power series solvers"
    )
    parser.add_argument("--version", action="version", version=f"SPPS {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sl": "Eigenvalues of a regular Sturm-Liouville problem",
        "hill": "Band edges and discriminant of a periodic (Hill) problem",
        "well": "Bound states of a quantum well on the line",
        "layer": "Reflectance/transmittance sweep of an inhomogeneous layer",
        "zs": "Discrete eigenvalues of the Zakharov-Shabat system",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    run = sub.add_parser("run", parents=[common], help="Solve the problem described by a config")
    run.add_argument("config_file", help="YAML run configuration naming its command")
    repro = sub.add_parser(
        "reproduce", parents=[common], help="Reproduce a published table and check tolerances"
    )
    repro.add_argument("table_id", help="Table id (e.g. 4.1, 5.1, zs-box) or 'all'")
    return parser


def _setup_logging(args, config: RunConfig | None = None) -> logging.Logger:
    """Configure the ``spps`` logger; logs always go to stderr."""
    level = "DEBUG" if args.verbose else (config.logging.level if config else "INFO")
    log_file = config.logging.file if config else None
    fmt = config.logging.format if config else None
    return setup_logger(
        "spps", level=level, log_file=log_file, format_string=fmt, stream=sys.stderr
    )


def _load_run_config(args) -> RunConfig:
    """Config file (if any), the subcommand, and the --m/--N overrides."""
    path = getattr(args, "config_file", None) or args.config
    config = load_config(path) if path else RunConfig()
    if args.command in COMMANDS:
        config = config.model_copy(update={"command": args.command})
    elif args.command == "run" and config.command is None:
        raise ConfigurationError(f"Config {path} does not name a command")

    overrides = {k: v for k, v in (("m", args.m), ("N", args.N)) if v is not None}
    if overrides:
        try:
            numerics = NumericsConfig(**{**config.numerics.model_dump(), **overrides})
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigurationError(f"Invalid --{first['loc'][0]}: {first['msg']}") from e
        config = config.model_copy(update={"numerics": numerics})
    return config


def _complex_columns(value: complex) -> tuple[float, float]:
    return float(value.real), float(value.imag)


def _run_sl(config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    recorder.start_stage("sl")
    problem = sl_from_config(config.sl, config.numerics)
    result = solve(problem, config.numerics.N, settings=config.rootfind, numerics=config.numerics)
    rows = [
        (i, *_complex_columns(r.value), r.residual, r.error_estimate, r.center.real)
        for i, r in enumerate(result.eigenvalues)
    ]
    write_csv(
        out / "eigenvalues.csv",
        ("n", "re_lambda", "im_lambda", "residual", "error_estimate", "center"),
        rows,
    )
    for center in result.failed_centers:
        recorder.record_event("shift_failed", {"center": center})
    recorder.end_stage(
        "sl", {"eigenvalues": len(result), "centers": [c.real for c in result.centers]}
    )
    return {"eigenvalues": [[v.real, v.imag] for v in result.values]}


def _run_hill(config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    cfg = config.hill
    numerics = config.numerics
    recorder.start_stage("hill")
    problem = hill_from_config(cfg, numerics)
    result = solve_hill(problem, numerics.N, cfg.count, config.rootfind, numerics)
    write_csv(
        out / "band_edges.csv",
        ("n", "lambda", "kind", "error_estimate"),
        [(e.index, e.value, e.kind, e.error_estimate) for e in result.edges.edges],
    )
    if not result.edges.interlaced:
        recorder.record_event("interlacing_violated")
    summary = {"lambda0": result.lambda0, "band_edges": result.edges.values}

    if cfg.curve is not None:
        lo, hi, samples = cfg.curve
        lambdas = np.linspace(lo, hi, int(samples))
        curve = sample_discriminant(result.discriminant, lambdas)
        if cfg.partner:
            partner = susy_partner(problem, result.f0, numerics.N, config.rootfind, numerics)
            partner_curve = sample_discriminant(partner.discriminant, lambdas)
            write_csv(
                out / "discriminant.csv",
                ("lambda", "D", "D_partner"),
                [(lam, d, dp) for (lam, d), (_, dp) in zip(curve, partner_curve)],
            )
            summary["max_partner_gap"] = max(
                abs(d - dp) for (_, d), (_, dp) in zip(curve, partner_curve)
            )
        else:
            write_csv(out / "discriminant.csv", ("lambda", "D"), curve)
    recorder.end_stage("hill", {"lambda0": result.lambda0, "edges": len(result.edges.edges)})
    return summary


def _run_well(config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    recorder.start_stage("well")
    well = well_from_config(config.well, config.numerics)
    spectrum = solve_well(well, config.numerics.N, config.rootfind, config.numerics)
    rows = [
        (i, mode.lam, mode.matching_residual, parity(mode), mode.suspect)
        for i, mode in enumerate(spectrum.modes)
    ]
    write_csv(
        out / "eigenvalues.csv", ("n", "lambda", "matching_residual", "parity", "suspect"), rows
    )
    for mode in spectrum.modes:
        if mode.suspect:
            recorder.record_event("suspect_eigenvalue", {"lambda": mode.lam})
    recorder.end_stage("well", {"eigenvalues": len(spectrum.eigenvalues)})
    return {"eigenvalues": spectrum.eigenvalues}


def _run_layer(config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    cfg = config.layer
    recorder.start_stage("layer")
    profile = layer_from_config(cfg, config.numerics)
    degrees = cfg.theta_degrees()
    results = sweep(
        profile, cfg.k, [math.radians(t) for t in degrees], config.numerics.N, config.numerics
    )
    rows = [
        (
            deg,
            r.R.real,
            r.R.imag,
            abs(r.R) ** 2,
            r.T.real,
            r.T.imag,
            abs(r.T) ** 2,
            r.energy_check,
        )
        for deg, r in zip(degrees, results)
    ]
    write_csv(
        out / "rt_sweep.csv",
        ("theta_deg", "re_R", "im_R", "abs_R2", "re_T", "im_T", "abs_T2", "energy_check"),
        rows,
    )
    evanescent = [deg for deg, r in zip(degrees, results) if r.evanescent]
    if evanescent:
        recorder.record_event("evanescent_angles", {"theta_deg": evanescent})
    recorder.end_stage("layer", {"angles": len(results), "evanescent": len(evanescent)})
    return {"angles": len(results), "evanescent": evanescent}


def _run_zs(config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    cfg = config.zs
    recorder.start_stage("zs")
    potential = zs_from_config(cfg, config.numerics)
    result = solve_zs(
        potential, config.numerics.N, config.rootfind, config.numerics, cfg.eigenvectors
    )
    spectrum = result.spectrum
    rows = [
        (i, *_complex_columns(r.value), r.residual, "real")
        for i, r in enumerate(spectrum.eigenvalues)
    ]
    rows += [
        (len(rows) + i, *_complex_columns(r.value), r.residual, "nonreal")
        for i, r in enumerate(spectrum.nonreal)
    ]
    write_csv(
        out / "eigenvalues.csv", ("n", "re_lambda", "im_lambda", "residual", "kind"), rows
    )
    nodes = potential.U.grid.nodes
    for i, pair in enumerate(result.eigenpairs):
        write_csv(
            out / f"eigenvector_{i}.csv",
            ("x", "re_n1", "im_n1", "re_n2", "im_n2"),
            zip(nodes, pair.n1.real, pair.n1.imag, pair.n2.real, pair.n2.imag),
        )
    recorder.end_stage(
        "zs",
        {
            "eigenvalues": len(spectrum.eigenvalues),
            "nonreal": len(spectrum.nonreal),
            "a0": float(result.dispersion.coeffs[0].real),
        },
    )
    return {
        "eigenvalues": [float(v) for v in spectrum.real_values()],
        "nonreal": [[r.value.real, r.value.imag] for r in spectrum.nonreal],
    }


RUNNERS = {
    "sl": _run_sl,
    "hill": _run_hill,
    "well": _run_well,
    "layer": _run_layer,
    "zs": _run_zs,
}


def _run_reproduce(args, config: RunConfig, out: Path, recorder: RunRecorder) -> dict:
    ids = table_ids() if args.table_id == "all" else [args.table_id]
    summary = {}
    failed = []
    for table_id in ids:
        recorder.start_stage(f"reproduce:{table_id}")
        result = reproduce(table_id, out, config.rootfind)
        recorder.end_stage(
            f"reproduce:{table_id}", {"passed": result.passed, "max_error": result.max_error}
        )
        summary[table_id] = {"passed": result.passed, "max_error": result.max_error}
        if not result.passed:
            failed.append(table_id)
    if failed:
        raise ToleranceFailure(
            f"Tolerance check failed for table(s) {', '.join(failed)}", tables=failed
        )
    return summary


def _report(args, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        status = payload["status"]
        print(f"{payload.get('command', 'spps')}: {status}")
        if status != "success":
            print(f"  {payload.get('error', '')}")
        for key, value in payload.get("result", {}).items():
            print(f"  {key}: {value}")


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = create_parser().parse_args(argv)
    _setup_logging(args)

    recorder = RunRecorder(args.command)
    config: RunConfig | None = None
    out: Path | None = None
    start_time = time.time()
    try:
        config = _load_run_config(args)
        _setup_logging(args, config)
        out = Path(args.out or config.output.directory)
        if args.command == "reproduce":
            result = _run_reproduce(args, config, out, recorder)
        else:
            result = RUNNERS[config.command](config, out, recorder)
        code, payload = EXIT_OK, {"status": "success", "result": result}
    except SPPSError as e:
        if isinstance(e, ConfigurationError):
            code, status = EXIT_CONFIG, "config_error"
        elif isinstance(e, ToleranceFailure):
            code, status = EXIT_TOLERANCE, "tolerance_failure"
        else:
            code, status = EXIT_NUMERIC, "error"
        payload = {"status": status, "code": e.code, "error": str(e)}
        logger.error(f"{e.code}: {e}")
        recorder.record_failure(args.command, e)
    payload["command"] = config.command if config and args.command == "run" else args.command
    payload["runtime_s"] = round(time.time() - start_time, 3)

    if out is not None and config is not None and config.output.report:
        recorder.save(out / "run_report.json")
    _report(args, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
