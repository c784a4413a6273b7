"""Uncertainty, error and disturbance inequalities for one measured scenario."""

import math
from dataclasses import astuple, dataclass, fields

from ..utils.errors import DomainError

EXACT_TOLERANCE = 1e-9
GRID_TOLERANCE = 1e-5

BACKEND_TOLERANCES = {"gaussian": EXACT_TOLERANCE, "grid": GRID_TOLERANCE}


@dataclass(frozen=True)
class MeasurementReport:
    """Every spread of one scenario.

    ``dx_i``/``dp_i`` are the initial system spreads, ``dei_*`` retrodictive
    errors, ``def_*`` predictive errors, ``dd_*`` disturbances, ``dmu_*f``
    final pointer spreads and ``dx_f``/``dp_f`` final system spreads.
    """

    dx_i: float
    dp_i: float
    dei_x: float
    dei_p: float
    def_x: float
    def_p: float
    dd_x: float
    dd_p: float
    dmu_xf: float
    dmu_pf: float
    dx_f: float
    dp_f: float
    hbar: float = 1.0
    backend: str = "gaussian"

    def __post_init__(self):
        for name, value in self.deltas().items():
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and nonnegative, got {value}")

    def deltas(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in DELTA_NAMES}


DELTA_NAMES = tuple(f.name for f in fields(MeasurementReport) if f.name not in ("hbar", "backend"))


@dataclass(frozen=True)
class InequalityRecord:
    name: str
    lhs: float
    bound: float
    margin: float
    satisfied: bool

    def as_row(self) -> tuple:
        return astuple(self)


# (name, left factor, right factor, bound in units of hbar)
INEQUALITIES = (
    ("kennard", "dx_i", "dp_i", 0.5),
    ("retrodictive_errors", "dei_x", "dei_p", 0.5),
    ("predictive_errors", "def_x", "def_p", 0.5),
    ("retrodictive_x_disturbance_p", "dei_x", "dd_p", 0.5),
    ("retrodictive_p_disturbance_x", "dei_p", "dd_x", 0.5),
    ("predictive_x_disturbance_p", "def_x", "dd_p", 0.5),
    ("predictive_p_disturbance_x", "def_p", "dd_x", 0.5),
    ("extended_pointers", "dmu_xf", "dmu_pf", 1.0),
    ("cross_final_x_pointer_p", "dx_f", "dmu_pf", 1.0),
    ("cross_pointer_x_final_p", "dmu_xf", "dp_f", 1.0),
    ("final_kennard", "dx_f", "dp_f", 0.5),
)


def evaluate(report: MeasurementReport, tolerance: float | None = None) -> list[InequalityRecord]:
    """The eleven inequality records, in fixed order."""
    if tolerance is None:
        tolerance = BACKEND_TOLERANCES.get(report.backend, GRID_TOLERANCE)
    records = []
    for name, left, right, factor in INEQUALITIES:
        lhs = getattr(report, left) * getattr(report, right)
        bound = factor * report.hbar
        margin = lhs - bound
        records.append(InequalityRecord(name, lhs, bound, margin, margin >= -tolerance))
    return records


def all_satisfied(records: list[InequalityRecord]) -> bool:
    return all(record.satisfied for record in records)


@dataclass(frozen=True)
class VarianceResiduals:
    """|lhs^2 - sum of squares| for the four variance-addition identities."""

    mu_xf: float
    mu_pf: float
    xf: float
    pf: float

    def worst(self) -> float:
        return max(astuple(self))


def variance_addition(report: MeasurementReport) -> VarianceResiduals:
    r = report
    return VarianceResiduals(
        mu_xf=abs(r.dmu_xf**2 - (r.dx_i**2 + r.dei_x**2)),
        mu_pf=abs(r.dmu_pf**2 - (r.dp_i**2 + r.dei_p**2)),
        xf=abs(r.dx_f**2 - (r.dx_i**2 + r.dd_x**2)),
        pf=abs(r.dp_f**2 - (r.dp_i**2 + r.dd_p**2)),
    )
