"""
Command-line entry point for the weak measurement simulator

Subcommands:
- weak-value: weak value of an observable between two states
- simulate: run one scenario file and write its result row
- sweep: run a scenario over a coupling ladder and fit convergence orders
- verify: run the acceptance battery
- estimate: estimate weak values from the shifts recorded in a results CSV

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""
import argparse
import sys
from typing import List, Optional

import pandas as pd
from loguru import logger
from pydantic import ValidationError

from config import settings
from models.scenario import Backend
from modules.exceptions import ReportWriteError, WeakMeasurementError
from modules.harness import (
    build_pointer,
    emit_fits,
    emit_report,
    estimate_from_report,
    read_report,
    run_scenario,
    sweep_g,
)
from modules.logging_utils import LogContext, configure_logging
from modules.measurement import simulate
from modules.pointer_space import dump_wavefunction
from modules.scenario_loader import load_scenario, parse_vector, resolve_observable
from modules.system_algebra import make_state, weak_value
from modules.verification import AcceptanceBattery


EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2


# ============================================================================
# Subcommand handlers
# ============================================================================

def cmd_weak_value(args: argparse.Namespace) -> int:
    psi_i = make_state(parse_vector(args.psi_i))
    A = resolve_observable(args.observable, dim=psi_i.dim)
    w = weak_value(A, psi_i, make_state(parse_vector(args.psi_f)))
    print("a,b")
    print(f"{w.a:.17g},{w.b:.17g}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.backend:
        scenario = scenario.with_backend(Backend(args.backend))
    if args.g is not None:
        scenario = scenario.with_g(args.g)

    with LogContext(f"simulate {scenario.scenario_id}"):
        phi = build_pointer(scenario)
        result = run_scenario(scenario, phi)
        emit_report([result], args.out)
        if args.dump_pointer:
            alpha = simulate(scenario.coupling(), phi, scenario.backend)
            dump_wavefunction(alpha.amplitudes, alpha.grid, args.dump_pointer)
    return EXIT_OK


def _parse_ladder(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse g ladder {text!r}")


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    with LogContext(f"sweep {scenario.scenario_id}"):
        report = sweep_g(scenario, args.g_ladder)
        emit_report(report.results, args.out)
        if args.fit_out:
            emit_fits(report, args.fit_out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    battery = AcceptanceBattery(seed=args.seed, cases=args.cases)
    summary = battery.check_all()
    emit_report(battery.results, args.out)
    if args.checks_out:
        frame = pd.DataFrame([c.to_row() for c in battery.checks], columns=["name", "status", "message"])
        try:
            frame.to_csv(args.checks_out, index=False, lineterminator="\n")
        except OSError as e:
            raise ReportWriteError(str(args.checks_out), str(e))

    counts = summary["summary"]
    logger.info(f"Verification {summary['status']}: {counts['passed']}/{counts['total']} checks passed")
    return EXIT_OK if counts["failed"] == 0 else EXIT_VERIFICATION_FAILED


def cmd_estimate(args: argparse.Namespace) -> int:
    frame = estimate_from_report(read_report(args.source), m=args.mass)
    target = args.out if args.out else sys.stdout
    try:
        frame.to_csv(target, index=False, float_format=settings.csv_float_format, lineterminator="\n")
    except OSError as e:
        raise ReportWriteError(str(args.out), str(e))
    return EXIT_OK


# ============================================================================
# Argument parsing
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakval",
        description="Simulate pre- and post-selected weak measurements and check them against first-order theory",
    )
    parser.add_argument(
        "--log-level", default=settings.log_level,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Log level for stderr output"
    )
    parser.add_argument(
        "--log-file", default=settings.log_file_path or None,
        help="Optional log file (rotated at 10 MB)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    wv = sub.add_parser("weak-value", help="Print the weak value a, b")
    wv.add_argument("--observable", required=True, help="pauli-x|pauli-y|pauli-z, inline rows, or a matrix file")
    wv.add_argument("--psi-i", required=True, help="Pre-selected state, comma-separated a+bi entries")
    wv.add_argument("--psi-f", required=True, help="Post-selected state, comma-separated a+bi entries")
    wv.set_defaults(handler=cmd_weak_value)

    sim = sub.add_parser("simulate", help="Run one scenario file")
    sim.add_argument("--scenario", required=True, help="Scenario file")
    sim.add_argument("--backend", choices=[b.value for b in Backend], help="Override the scenario's backend")
    sim.add_argument("--g", type=float, help="Override the scenario's coupling")
    sim.add_argument("--out", help="Results CSV (stdout when omitted)")
    sim.add_argument("--dump-pointer", help="Write the post-selected pointer amplitudes to this file")
    sim.set_defaults(handler=cmd_simulate)

    sw = sub.add_parser("sweep", help="Convergence sweep over a coupling ladder")
    sw.add_argument("--scenario", required=True, help="Scenario file")
    sw.add_argument("--g-ladder", required=True, type=_parse_ladder, help="Comma-separated increasing g values")
    sw.add_argument("--out", help="Per-g results CSV (stdout when omitted)")
    sw.add_argument("--fit-out", help="Slope fits CSV")
    sw.set_defaults(handler=cmd_sweep)

    ver = sub.add_parser("verify", help="Run the acceptance battery")
    ver.add_argument("--seed", type=int, default=7, help="Battery seed")
    ver.add_argument("--cases", type=int, default=100, help="Random scenarios in the estimator battery")
    ver.add_argument("--out", help="Battery results CSV (stdout when omitted)")
    ver.add_argument("--checks-out", help="Check summary CSV")
    ver.set_defaults(handler=cmd_verify)

    est = sub.add_parser("estimate", help="Estimate weak values from a results CSV")
    est.add_argument("--from", dest="source", required=True, help="Results CSV written by simulate/sweep/verify")
    est.add_argument("--mass", type=float, default=settings.default_mass, help="Pointer mass used for the rows")
    est.add_argument("--out", help="Estimates CSV (stdout when omitted)")
    est.set_defaults(handler=cmd_estimate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_file)

    try:
        return args.handler(args)
    except (WeakMeasurementError, ValidationError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
