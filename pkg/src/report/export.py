"""CSV artifacts for reports, sweeps and the superposition experiment."""

from pathlib import Path
from typing import Mapping, Sequence

from ..utils.csv_output import write_csv_atomic
from .inequalities import DELTA_NAMES, INEQUALITIES, InequalityRecord, MeasurementReport
from .measure import PacketMass, backend_agreement
from .sweep import SweepRow

INEQUALITY_HEADER = ("name", "lhs", "bound", "margin", "satisfied")
MARGIN_NAMES = tuple(f"margin_{name}" for name, *_ in INEQUALITIES)
SWEEP_HEADER = ("lambda", "status", *DELTA_NAMES, *MARGIN_NAMES, "error")


def write_inequalities_csv(records: Sequence[InequalityRecord], path: str | Path) -> Path:
    return write_csv_atomic(path, INEQUALITY_HEADER, (record.as_row() for record in records))


def write_report_csv(reports: Mapping[str, MeasurementReport], path: str | Path) -> Path:
    """One column per backend; with two backends a relative-difference column follows."""
    backends = list(reports)
    header = ["quantity", *backends]
    agreement = None
    if len(backends) == 2:
        agreement = backend_agreement(reports[backends[0]], reports[backends[1]])
        header.append("relative_difference")
    rows = []
    for name in DELTA_NAMES:
        row = [name, *(getattr(reports[b], name) for b in backends)]
        if agreement is not None:
            row.append(agreement[name])
        rows.append(row)
    return write_csv_atomic(path, header, rows)


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    def cells(row: SweepRow) -> list:
        if not row.ok:
            return [row.lam, "failed", *([None] * (len(DELTA_NAMES) + len(MARGIN_NAMES))), row.error]
        deltas = [getattr(row.report, name) for name in DELTA_NAMES]
        margins = [record.margin for record in row.records]
        return [row.lam, "ok", *deltas, *margins, None]

    return write_csv_atomic(path, SWEEP_HEADER, (cells(row) for row in rows))


def write_superposition_csv(results: Sequence[PacketMass], path: str | Path) -> Path:
    return write_csv_atomic(
        path,
        ("packet", "weight", "region_mass"),
        ((r.index, r.weight, r.mass) for r in results),
    )
