"""akmeter subcommands.

Exit codes: 0 success, 1 input or numerical error, 2 an inequality is violated.
"""

import argparse
import logging
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.fft
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from config.settings import Settings, get_settings

from ..algebra.conjugation import (
    DEFAULT_MAX_STEPS,
    ak_generator,
    commutator_table,
    derive_error_disturbance,
    heisenberg_finals,
    is_unbiased,
)
from ..algebra.expressions import parse_polynomial
from ..algebra.generators import STANDARD_TABLE, CommutationTable, Generator, standard_omega
from ..algebra.polynomial import CanonicalPolynomial, commutator
from ..algebra.scalars import ExactScalar
from ..gaussian.moments import coherent_system
from ..grid.interaction import mean_error
from ..grid.lattice import AxisSpec, AXIS_LABELS, init_product_gaussian
from ..grid.outcomes import outcome_distribution, sample_outcomes, write_distribution_csv, write_samples_csv
from ..report.export import (
    write_inequalities_csv,
    write_report_csv,
    write_superposition_csv,
    write_sweep_csv,
)
from ..report.inequalities import BACKEND_TOLERANCES, MeasurementReport, all_satisfied, evaluate, variance_addition
from ..report.measure import backend_agreement, measure_gaussian, measure_grid, superposition_masses
from ..report.polarization import polarization_check
from ..report.sweep import lambda_sweep, sweep_is_monotone
from ..utils.errors import AkmeterError, ScenarioError
from .scenario import Scenario, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

EXPECTED_FINALS = {
    Generator.X: "x + piP",
    Generator.P: "p - piX",
    Generator.MU_X: "muX + x + (1/2) piP",
    Generator.PI_X: "piX",
    Generator.MU_P: "muP + p - (1/2) piX",
    Generator.PI_P: "piP",
}

# The only non-vanishing commutators among the six derived operators
EXPECTED_COMMUTATORS = {
    ("eXi", "ePi"): "-i*hbar",
    ("eXi", "dP"): "-i*hbar",
    ("ePi", "dX"): "i*hbar",
    ("eXf", "ePf"): "i*hbar",
    ("eXf", "dP"): "-i*hbar",
    ("ePf", "dX"): "i*hbar",
}


def _final_name(gen: Generator) -> str:
    return f"{gen.label}f"


# ===== derive =====


def cmd_derive(
    coupling: float = 1.0,
    max_steps: int = DEFAULT_MAX_STEPS,
    table: CommutationTable = STANDARD_TABLE,
) -> str:
    """Heisenberg finals, error/disturbance operators and their commutators as text."""
    K = ak_generator(coupling)
    lines = [f"# Heisenberg finals (coupling {coupling:g})"]
    for gen, final in heisenberg_finals(K, max_steps, table).items():
        lines.append(f"{_final_name(gen)} = {final}")

    operators = derive_error_disturbance(K, max_steps, table).as_dict()
    lines.append("")
    lines.append("# Error and disturbance operators")
    for name, op in operators.items():
        unbiased = "unbiased" if is_unbiased(op) else "biased"
        lines.append(f"{name} = {op}    # {unbiased}")

    lines.append("")
    lines.append("# Identities")
    identities = (
        ("dX = eXi - eXf", operators["dX"] == operators["eXi"] - operators["eXf"]),
        ("dP = ePi - ePf", operators["dP"] == operators["ePi"] - operators["ePf"]),
    )
    for text, holds in identities:
        lines.append(f"{text}: {'holds' if holds else 'FAILS'}")

    lines.append("")
    lines.append("# Commutators")
    for a, b, value in commutator_table(operators, table):
        lines.append(f"[{a}, {b}] = {value}")
    return "\n".join(lines) + "\n"


# ===== report =====


def _measure(scenario: Scenario, backend: str, lam: float | None = None) -> MeasurementReport:
    lam = scenario.lam if lam is None else lam
    if backend == "gaussian":
        mean, cov = scenario.system_block()
        return measure_gaussian(mean, cov, lam, scenario.hbar, scenario.coupling)
    return measure_grid(scenario.initial_grid_state(lam), scenario.coupling)


def _report_table(backend: str, report: MeasurementReport, records) -> Table:
    table = Table(title=f"{backend} backend (hbar = {report.hbar:g})")
    table.add_column("inequality")
    table.add_column("lhs", justify="right")
    table.add_column("bound", justify="right")
    table.add_column("margin", justify="right")
    table.add_column("ok")
    for r in records:
        table.add_row(r.name, f"{r.lhs:.10g}", f"{r.bound:.10g}", f"{r.margin:.3e}", "yes" if r.satisfied else "NO")
    return table


def cmd_report(scenario: Scenario, out_dir: Path, console: Console) -> int:
    reports: dict[str, MeasurementReport] = {}
    satisfied = True
    for backend in scenario.backends():
        report = _measure(scenario, backend)
        records = evaluate(report)
        reports[backend] = report
        satisfied &= all_satisfied(records)
        write_inequalities_csv(records, out_dir / f"inequalities_{backend}.csv")
        console.print(_report_table(backend, report, records))
        residuals = variance_addition(report)
        console.print(f"variance-addition residual ({backend}): {residuals.worst():.3e}")

    path = write_report_csv(reports, out_dir / "report.csv")
    if len(reports) == 2:
        worst = max(backend_agreement(reports["gaussian"], reports["grid"]).values())
        console.print(f"backend agreement: worst relative difference {worst:.3e}")
    logger.info("Wrote %s", path)
    return EXIT_OK if satisfied else EXIT_VIOLATION


# ===== superposition =====


def cmd_superposition(scenario: Scenario, out_dir: Path, console: Console) -> int:
    packets = scenario.packets()
    results = superposition_masses(
        scenario.initial_grid_state(), packets, scenario.coupling, scenario.region_fraction
    )
    write_superposition_csv(results, out_dir / "superposition.csv")

    table = Table(title="Pointer mass near each packet")
    table.add_column("packet", justify="right")
    table.add_column("|c_n|^2", justify="right")
    table.add_column("region mass", justify="right")
    for r in results:
        table.add_row(str(r.index), f"{r.weight:.6f}", f"{r.mass:.6f}")
    console.print(table)
    return EXIT_OK


# ===== sweep =====


def cmd_sweep(scenario: Scenario, lambdas: Sequence[float], out_dir: Path, console: Console, threads: int = 1) -> int:
    backend = "grid" if scenario.backend == "grid" else "gaussian"
    if backend == "gaussian":
        scenario.system_block()  # reject non-Gaussian systems up front

    rows = lambda_sweep(lambdas, lambda lam: _measure(scenario, backend, lam), threads=threads)
    write_sweep_csv(rows, out_dir / "sweep.csv")

    table = Table(title=f"lambda sweep ({backend} backend)")
    for column in ("lambda", "dei_x", "dei_p", "product", "status"):
        table.add_column(column, justify="right")
    for row in rows:
        if row.ok:
            r = row.report
            table.add_row(f"{row.lam:g}", f"{r.dei_x:.10g}", f"{r.dei_p:.10g}", f"{r.dei_x * r.dei_p:.10g}", "ok")
        else:
            table.add_row(f"{row.lam:g}", "", "", "", "failed")
    console.print(table)

    if not sweep_is_monotone(rows, BACKEND_TOLERANCES[backend]):
        logger.warning("Retrodictive errors are not monotone in lambda")
    violated = any(row.ok and not all_satisfied(row.records) for row in rows)
    return EXIT_VIOLATION if violated else EXIT_OK


# ===== sample =====


def cmd_sample(scenario: Scenario, count: int, seed: int, out_dir: Path, console: Console) -> int:
    dist = outcome_distribution(scenario.initial_grid_state(), scenario.coupling)
    samples = sample_outcomes(dist, count, seed)
    write_distribution_csv(dist, out_dir / "distribution.csv")
    write_samples_csv(samples, out_dir / "samples.csv")
    mean_x, mean_p = dist.mean()
    console.print(
        f"{count} samples: empirical mean ({samples[:, 0].mean():.6f}, {samples[:, 1].mean():.6f}), "
        f"distribution mean ({mean_x:.6f}, {mean_p:.6f})"
    )
    return EXIT_OK


# ===== check =====


def _check_table(table: CommutationTable) -> bool:
    omega = standard_omega()
    for j in Generator:
        for k in Generator:
            value = commutator(CanonicalPolynomial.generator(j), CanonicalPolynomial.generator(k), table)
            if value != CanonicalPolynomial.constant(ExactScalar.of(0, omega[j][k], power=1)):
                return False
    return True


def _check_finals(table: CommutationTable) -> bool:
    finals = heisenberg_finals(ak_generator(), table=table)
    return all(finals[gen] == parse_polynomial(text) for gen, text in EXPECTED_FINALS.items())


def _check_commutators(table: CommutationTable) -> bool:
    operators = derive_error_disturbance(ak_generator(), table=table).as_dict()
    for a, b, value in commutator_table(operators, table):
        expected = EXPECTED_COMMUTATORS.get((a, b))
        if expected is None:
            if not value.is_zero:
                return False
        elif value != parse_polynomial(expected):
            return False
    return True


def _check_unbiased(table: CommutationTable) -> bool:
    operators = derive_error_disturbance(ak_generator(), table=table).as_dict()
    return all(is_unbiased(op) for op in operators.values())


def _check_backends() -> bool:
    axes = tuple(AxisSpec(32, 14.0, label) for label in AXIS_LABELS)
    width = 1 / np.sqrt(2)
    state = init_product_gaussian(axes, 0.5, -0.25, width, 1.0, edge_margin=5.0)
    grid = measure_grid(state)
    exact = measure_gaussian(*coherent_system(width, 0.5, -0.25), 1.0)
    if max(backend_agreement(exact, grid).values()) > 1e-4:
        return False
    return all(abs(mean_error(state, kind)) < 1e-6 for kind in ("eiX", "eiP", "efX", "efP"))


def cmd_check(console: Console, table: CommutationTable = STANDARD_TABLE) -> int:
    """Fast invariant suite; stops at the first failure and names it."""
    checks: list[tuple[str, Callable[[], bool]]] = [
        ("commutation table", lambda: _check_table(table)),
        ("heisenberg finals", lambda: _check_finals(table)),
        ("error-disturbance commutators", lambda: _check_commutators(table)),
        ("operator unbiasedness", lambda: _check_unbiased(table)),
        ("polarization identity", lambda: polarization_check(4, 4, 100, seed=0)),
        ("backend agreement", _check_backends),
    ]
    for name, check in checks:
        try:
            passed = check()
        except Exception:
            logger.exception("%s raised", name)
            passed = False
        if not passed:
            console.print(f"FAILED: {name}")
            return EXIT_ERROR
        console.print(f"ok: {name}")
    return EXIT_OK


# ===== entry point =====


def _shared_flags(after_command: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand.

    After the subcommand they default to SUPPRESS, so a value given before
    the subcommand is not reset.
    """
    unset = argparse.SUPPRESS if after_command else None
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", type=Path, default=unset, help="Output directory (default: settings.output_dir)")
    shared.add_argument("--backend", choices=["gaussian", "grid", "both"], default=unset,
                        help="Override the scenario backend")
    shared.add_argument("--seed", type=int, default=unset, help="Override the scenario seed")
    shared.add_argument("--verbose", "-v", action="store_true", default=unset if after_command else False,
                        help="Debug logging")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="akmeter",
        description="Simultaneous position-momentum measurement: derivations, reports and simulations",
        parents=[_shared_flags(after_command=False)],
    )
    after = [_shared_flags(after_command=True)]

    sub = parser.add_subparsers(dest="command", required=True)

    derive = sub.add_parser("derive", parents=after, help="Print the exact Heisenberg finals and commutators")
    derive.add_argument("--coupling", type=float, default=None, help="Interaction strength g")

    report = sub.add_parser("report", parents=after, help="Evaluate every inequality for a scenario")
    report.add_argument("config", type=Path)

    superposition = sub.add_parser("superposition", parents=after, help="Pointer mass near each packet of a superposition")
    superposition.add_argument("config", type=Path)

    sweep = sub.add_parser("sweep", parents=after, help="Sweep the apparatus width lambda")
    sweep.add_argument("config", type=Path)
    sweep.add_argument("--lambdas", type=str, default=None, help="Comma-separated lambda values")

    sample = sub.add_parser("sample", parents=after, help="Sample pointer outcomes")
    sample.add_argument("config", type=Path)
    sample.add_argument("--count", type=int, default=1000)

    sub.add_parser("check", parents=after, help="Run the fast invariant suite")
    return parser


def _scenario_defaults(settings: Settings) -> dict:
    return {
        "hbar": settings.hbar,
        "coupling": settings.coupling,
        "region_fraction": settings.region_fraction,
        "grid": {
            "n": settings.grid_points,
            "length": settings.grid_length,
            "edge_margin": settings.edge_margin,
            "on_unresolved": settings.on_unresolved,
            "overlap_warning": settings.overlap_warning,
        },
    }


def _parse_lambdas(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise ScenarioError(f"invalid lambda list '{text}'", field="--lambdas") from exc


def run(args: argparse.Namespace, settings: Settings, console: Console) -> int:
    out_dir = args.out or settings.output_dir

    if args.command == "derive":
        coupling = settings.coupling if args.coupling is None else args.coupling
        print(cmd_derive(coupling, settings.max_steps), end="")
        return EXIT_OK
    if args.command == "check":
        return cmd_check(console)

    scenario = load_scenario(args.config, _scenario_defaults(settings))
    updates = {}
    if args.backend:
        updates["backend"] = args.backend
    if args.seed is not None:
        updates["seed"] = args.seed
    scenario = scenario.model_copy(update=updates)

    if args.command == "report":
        return cmd_report(scenario, out_dir, console)
    if args.command == "superposition":
        return cmd_superposition(scenario, out_dir, console)
    if args.command == "sweep":
        lambdas = _parse_lambdas(args.lambdas) if args.lambdas else scenario.lambdas
        if not lambdas:
            raise ScenarioError("no lambda values given", field="lambdas")
        return cmd_sweep(scenario, lambdas, out_dir, console, threads=settings.threads)
    if args.command == "sample":
        return cmd_sample(scenario, args.count, scenario.seed, out_dir, console)
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on a usage error, which would read as a violation
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(show_path=False)],
        force=True,
    )
    console = Console()
    settings = get_settings()
    try:
        with scipy.fft.set_workers(settings.threads):
            return run(args, settings, console)
    except AkmeterError as exc:
        console.print(f"error: {exc}", markup=False, highlight=False)
        return EXIT_ERROR
