"""Joint pointer distribution rho(muX, muP) and its regions and samples."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..utils.csv_output import write_csv_atomic
from ..utils.errors import DomainError
from .interaction import apply_U
from .lattice import METER_P, METER_X, SYSTEM, AxisSpec, GridState, to_position

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rectangle:
    """Half-open box [xlo, xhi) x [plo, phi) in (muX, muP)."""

    xlo: float
    xhi: float
    plo: float
    phi: float


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    weights: np.ndarray
    axes: tuple[AxisSpec, AxisSpec]

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (self.axes[0].n, self.axes[1].n):
            raise DomainError(f"Weight shape {weights.shape} does not match the meter axes")
        if np.any(weights < 0):
            raise DomainError("Outcome weights must be nonnegative")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def cell_area(self) -> float:
        return self.axes[0].spacing * self.axes[1].spacing

    def total(self) -> float:
        return float(self.weights.sum() * self.cell_area)

    def domain(self) -> Rectangle:
        """Union of all cells."""
        (xlo, xhi), (plo, phi) = (_cell_span(axis) for axis in self.axes)
        return Rectangle(xlo, xhi, plo, phi)

    def marginal(self, axis: int) -> np.ndarray:
        """Density of muX (axis 0) or muP (axis 1)."""
        other = 1 - axis
        return self.weights.sum(axis=other) * self.axes[other].spacing

    def mean(self) -> tuple[float, float]:
        return tuple(
            float(np.sum(self.marginal(i) * self.axes[i].positions()) * self.axes[i].spacing)
            for i in range(2)
        )

    def variance(self) -> tuple[float, float]:
        means = self.mean()
        return tuple(
            float(np.sum(self.marginal(i) * (self.axes[i].positions() - means[i]) ** 2) * self.axes[i].spacing)
            for i in range(2)
        )


def _cell_span(axis: AxisSpec) -> tuple[float, float]:
    centers = axis.positions()
    half = axis.spacing / 2
    return float(centers[0] - half), float(centers[-1] + half)


def outcome_distribution(initial: GridState, coupling: float = 1.0) -> OutcomeDistribution:
    """rho(muX, muP) = integral dx |<x, muX, muP|U|Psi>|^2."""
    evolved = to_position(apply_U(initial, coupling))
    density = np.abs(evolved.amplitudes) ** 2
    weights = density.sum(axis=SYSTEM) * evolved.axes[SYSTEM].spacing
    return OutcomeDistribution(weights, (evolved.axes[METER_X], evolved.axes[METER_P]))


def region_mass(dist: OutcomeDistribution, rect: Rectangle) -> float:
    """Probability of the cells whose centres fall in ``rect``."""
    if rect.xhi < rect.xlo or rect.phi < rect.plo:
        raise DomainError(f"Rectangle bounds are reversed: {rect}")
    domain = dist.domain()
    slack = 1e-9 * max(dist.axes[0].length, dist.axes[1].length)
    if (
        rect.xlo < domain.xlo - slack
        or rect.xhi > domain.xhi + slack
        or rect.plo < domain.plo - slack
        or rect.phi > domain.phi + slack
    ):
        raise DomainError(f"Rectangle {rect} leaves the meter lattice {domain}")
    mu_x = dist.axes[0].positions()
    mu_p = dist.axes[1].positions()
    in_x = (mu_x >= rect.xlo) & (mu_x < rect.xhi)
    in_p = (mu_p >= rect.plo) & (mu_p < rect.phi)
    return float(dist.weights[np.ix_(in_x, in_p)].sum() * dist.cell_area)


def clip_rectangle(dist: OutcomeDistribution, rect: Rectangle) -> Rectangle:
    domain = dist.domain()
    return Rectangle(
        max(rect.xlo, domain.xlo),
        min(rect.xhi, domain.xhi),
        max(rect.plo, domain.plo),
        min(rect.phi, domain.phi),
    )


def sample_outcomes(dist: OutcomeDistribution, count: int, seed: int = 0) -> np.ndarray:
    """``count`` draws of (muX, muP): inverse CDF over cells, then uniform jitter inside the cell."""
    if count < 1:
        raise DomainError(f"count must be at least 1, got {count}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(dist.weights.ravel())
    cdf /= cdf[-1]
    cells = np.searchsorted(cdf, rng.random(count), side="right")
    cells = np.minimum(cells, cdf.size - 1)
    i, j = np.unravel_index(cells, dist.weights.shape)
    dx, dp = dist.axes[0].spacing, dist.axes[1].spacing
    mu_x = dist.axes[0].positions()[i] + rng.uniform(-0.5, 0.5, count) * dx
    mu_p = dist.axes[1].positions()[j] + rng.uniform(-0.5, 0.5, count) * dp
    return np.column_stack([mu_x, mu_p])


# ===== Export =====


def write_distribution_csv(dist: OutcomeDistribution, path: str | Path) -> Path:
    """Row-major over the meter lattice: header ``muX,muP,weight``."""
    mu_x = dist.axes[0].positions()
    mu_p = dist.axes[1].positions()
    rows = (
        (float(mu_x[i]), float(mu_p[j]), float(dist.weights[i, j]))
        for i in range(len(mu_x))
        for j in range(len(mu_p))
    )
    path = write_csv_atomic(path, ("muX", "muP", "weight"), rows)
    logger.info("Wrote outcome distribution to %s", path)
    return path


def write_samples_csv(samples: np.ndarray, path: str | Path) -> Path:
    path = write_csv_atomic(path, ("muX", "muP"), ((float(a), float(b)) for a, b in samples))
    logger.info("Wrote %d samples to %s", len(samples), path)
    return path
