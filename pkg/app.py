"""
Dynamical Lamb effect simulator for two qubits in a nonstationary cavity.

Command-line front end: reproduces the reference excitation probabilities
and concurrences, sweeps parameters, checks the closed forms against exact
diagonalization and scans finite-duration frequency ramps.

    python app.py reproduce
    python app.py sweep --unit ghz_linear --omega1 5 --omega2 3.75 --e0 3.721 --lambda 0.2 \
        --sweep omega2=3.8:4.6:10 --output exports/sweep.csv
"""
import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence

from dotenv import dotenv_values

from config.settings import config
from core.errors import DleError, EXIT_CONFIG, EXIT_OK, ConfigError, ValidityError
from models.physics import BasisLabel, GROUND, RampProtocol
from models.run import RUN_KEYS, RunConfig
from services import dynamics, entanglement, oracle
from services import quench as quench_service
from services.data_export import DataExportService, records_frame
from services.sweep import run_sweep
from utils.formatting import comparison_row, format_data_as_table

logger = logging.getLogger(__name__)

COMMANDS = ("reproduce", "sweep", "oracle-compare", "evolve")

# Reference parameters (linear GHz) and the rounded values they produce,
# each with its comparison tolerance (relative).
REFERENCE_PARAMETERS = {"unit": "ghz_linear", "omega1": 5.0, "omega2": 3.75, "e0": 3.721, "lambda": 0.2}
REFERENCE_VALUES = {
    "w_10": (1.472e-5, 1e-3),
    "w_11": (0.1, 1e-2),
    "c_1": (2.945e-5, 1e-3),
    "c_2": (1.553e-3, 1e-3),
}
NON_FACTORIZATION_MIN = 0.99

SPECTRAL_LABELS = (GROUND, BasisLabel(0, 1, 1), BasisLabel(0, 1, 0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dle", description="Two-qubit dynamical Lamb effect simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value run file (flags override it)")
    parser.add_argument("--omega1", type=float)
    parser.add_argument("--omega2", type=float)
    parser.add_argument("--e0", type=float)
    parser.add_argument("--lambda", dest="lambda", type=float)
    parser.add_argument("--unit", choices=("ghz_linear", "angular"))
    parser.add_argument("--cutoff", type=int)
    parser.add_argument("--sweep", help="name=start:stop:steps")
    parser.add_argument("--output")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--shape", choices=("linear", "smoothstep"))
    parser.add_argument("--tau-min", dest="tau_min", type=float, help="shortest ramp, units of 1/omega1")
    parser.add_argument("--tau-max", dest="tau_max", type=float, help="longest ramp, units of 1/omega1")
    parser.add_argument("--points", type=int)
    parser.add_argument("--no-drive", dest="drive", action="store_const", const=False)
    parser.add_argument("--tol-convergence", dest="tol_convergence", type=float)
    parser.add_argument("--tol-rtol", dest="tol_rtol", type=float)
    parser.add_argument("--tol-atol", dest="tol_atol", type=float)
    parser.add_argument("--tol-top-fock", dest="tol_top_fock", type=float)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def merge_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Reference defaults (reproduce only), then the config file, then flags."""
    merged: Dict[str, Any] = dict(REFERENCE_PARAMETERS) if args.command == "reproduce" else {}
    if args.config:
        file_values = dotenv_values(args.config)
        if not file_values:
            raise ConfigError(f"Config file '{args.config}' is missing or empty", parameter="config")
        merged.update({k.strip(): v for k, v in file_values.items()})
    for key in RUN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _emit(frame, run: RunConfig, command: str) -> None:
    path = run.output or DataExportService.default_output_path(command, repr(run), run.fmt)
    DataExportService.save(frame, path, run.fmt)
    print(path)


def reproduce(run: RunConfig) -> int:
    """Print the four reference observables next to their expected values."""
    params, quench = run.params, run.quench
    probs = quench_service.dle_probabilities(params, quench)
    conc = entanglement.conditional_concurrences(params, quench)
    computed = {"w_10": probs.w_10, "w_11": probs.w_11, "c_1": conc.c_1, "c_2": conc.c_2}

    rows = [comparison_row(name, computed[name], ref, tol) for name, (ref, tol) in REFERENCE_VALUES.items()]
    print(format_data_as_table(rows))

    extras = dict(quench_service.photon_sector_probabilities(params, quench))
    extras["non_factorization"] = quench_service.non_factorization(params, quench)
    extras["max_first_order_coefficient"] = quench_service.max_first_order_coefficient(params, quench)
    print()
    print(format_data_as_table([{"quantity": k, "value": v} for k, v in extras.items()]))
    if probs.validity_warning:
        logger.warning(f"Validity warning: {probs.reason}")

    failed = [row["observable"] for row in rows if not row["ok"]]
    if failed:
        raise ValidityError(f"Reference mismatch for {', '.join(failed)}", parameter=failed[0])
    if extras["non_factorization"] <= NON_FACTORIZATION_MIN:
        logger.warning(f"Non-factorization {extras['non_factorization']:.4f} is below {NON_FACTORIZATION_MIN}")
    return EXIT_OK


def sweep(run: RunConfig) -> int:
    if run.sweep is None:
        raise ConfigError("sweep needs --sweep name=start:stop:steps", parameter="sweep")
    rows = run_sweep(run)
    _emit(DataExportService.frame_from_rows(rows), run, "sweep")
    return EXIT_OK


def oracle_compare(run: RunConfig) -> int:
    tol = run.tolerance("tol_convergence", config.CONVERGENCE_TOL)
    rows = oracle.compare_with_closed_forms(run.params, run.quench, run.cutoff, tol=tol)
    spectral = oracle.eigenvalue_scaling(run.params, run.quench.omega1, run.cutoff, SPECTRAL_LABELS)
    print(format_data_as_table(spectral))
    frame = DataExportService.tagged_frame(
        {"amplitudes": records_frame(rows), "spectral": records_frame(spectral)})
    _emit(frame, run, "oracle")
    return EXIT_OK


def evolve(run: RunConfig) -> int:
    ramp = run.ramp
    omega1 = run.quench.omega1
    stepper = dynamics.StepperConfig(
        rtol=run.tolerance("tol_rtol", config.ODE_RTOL),
        atol=run.tolerance("tol_atol", config.ODE_ATOL),
        top_fock_limit=run.tolerance("tol_top_fock", config.TOP_FOCK_LIMIT),
    )
    protocol = RampProtocol.from_quench(run.quench, ramp.shape.value, tau=ramp.tau_min / omega1)
    grid = dynamics.log_tau_grid(ramp.tau_min / omega1, ramp.tau_max / omega1, ramp.points)
    table = dynamics.limit_scan(run.params, protocol, grid, cutoff=run.cutoff,
                                include_drive=ramp.drive, stepper=stepper)
    _emit(table, run, "evolve")
    return EXIT_OK


HANDLERS = {"reproduce": reproduce, "sweep": sweep, "oracle-compare": oracle_compare, "evolve": evolve}


def execute(command: str, run: RunConfig) -> int:
    return HANDLERS[command](run)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else config.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        config.validate()
    except ValueError as e:
        logger.error(f"Invalid environment configuration: {e}")
        return EXIT_CONFIG

    try:
        run = RunConfig.from_mapping(merge_settings(args))
        logger.info(f"Running {args.command} (unit={run.unit}, N={run.cutoff})")
        return execute(args.command, run)
    except DleError as e:
        where = f" [{e.parameter}]" if e.parameter else ""
        logger.error(f"{type(e).__name__}{where}: {e}")
        print(f"error{where}: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
