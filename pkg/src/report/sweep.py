"""Apparatus-width sweeps."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..utils.errors import AkmeterError, DomainError
from .inequalities import InequalityRecord, MeasurementReport, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    report: MeasurementReport | None = None
    records: list[InequalityRecord] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_row(lam: float, measure: Callable[[float], MeasurementReport]) -> SweepRow:
    try:
        if lam <= 0:
            raise DomainError(f"lambda must be positive, got {lam}")
        report = measure(lam)
        return SweepRow(lam, report, evaluate(report))
    except AkmeterError as exc:
        logger.warning("Sweep row lambda=%g failed: %s", lam, exc)
        return SweepRow(lam, error=str(exc))


def lambda_sweep(
    lambdas: Sequence[float],
    measure: Callable[[float], MeasurementReport],
    threads: int = 1,
) -> list[SweepRow]:
    """One row per lambda, in input order; a failing row is marked rather than raised."""
    lambdas = [float(lam) for lam in lambdas]
    if threads <= 1 or len(lambdas) <= 1:
        return [_run_row(lam, measure) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() yields in submission order regardless of completion order
        return list(pool.map(lambda lam: _run_row(lam, measure), lambdas))


def sweep_is_monotone(rows: Sequence[SweepRow], tolerance: float = 1e-9) -> bool:
    """Retrodictive position error grows and momentum error shrinks with lambda."""
    good = sorted((row for row in rows if row.ok), key=lambda row: row.lam)
    for before, after in zip(good, good[1:]):
        if after.lam == before.lam:
            continue
        if after.report.dei_x < before.report.dei_x - tolerance:
            return False
        if after.report.dei_p > before.report.dei_p + tolerance:
            return False
    return True
