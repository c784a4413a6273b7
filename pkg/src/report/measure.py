"""Build MeasurementReports from either backend and compare them."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..algebra.conjugation import ak_generator, derive_error_disturbance
from ..algebra.generators import Generator
from ..algebra.polynomial import LinearForm, linear_part
from ..gaussian.moments import (
    ak_apparatus_state,
    ak_transfer_matrix,
    compose_product,
    evolve,
    pointer_variances,
    rms_value,
)
from ..grid.interaction import apply_U, rms_errors
from ..grid.lattice import GridState, WavePacket, moments
from ..grid.outcomes import OutcomeDistribution, Rectangle, clip_rectangle, outcome_distribution, region_mass
from .inequalities import DELTA_NAMES, MeasurementReport

logger = logging.getLogger(__name__)

# Report fields fed by each error/disturbance operator
_OPERATOR_FIELDS = {
    "eXi": "dei_x",
    "ePi": "dei_p",
    "eXf": "def_x",
    "ePf": "def_p",
    "dX": "dd_x",
    "dP": "dd_p",
}

_GRID_FIELDS = {
    "eiX": "dei_x",
    "eiP": "dei_p",
    "efX": "def_x",
    "efP": "def_p",
    "dX": "dd_x",
    "dP": "dd_p",
}


@lru_cache(maxsize=32)
def _ak_linear_forms(coupling: float) -> dict[str, LinearForm]:
    operators = derive_error_disturbance(ak_generator(coupling))
    return {name: linear_part(op) for name, op in operators.as_dict().items()}


def measure_gaussian(
    system_mean: Sequence[float],
    system_cov,
    lam: float,
    hbar: float = 1.0,
    coupling: float = 1.0,
) -> MeasurementReport:
    state = compose_product(system_mean, system_cov, ak_apparatus_state(lam, hbar))
    after = evolve(state, ak_transfer_matrix(coupling, hbar))
    variances = pointer_variances(after)
    rms = {
        _OPERATOR_FIELDS[name]: rms_value(state, form)
        for name, form in _ak_linear_forms(float(coupling)).items()
    }
    return MeasurementReport(
        dx_i=state.std(Generator.X),
        dp_i=state.std(Generator.P),
        dmu_xf=float(np.sqrt(variances.mu_xf)),
        dmu_pf=float(np.sqrt(variances.mu_pf)),
        dx_f=float(np.sqrt(variances.xf)),
        dp_f=float(np.sqrt(variances.pf)),
        hbar=hbar,
        backend="gaussian",
        **rms,
    )


def measure_grid(initial: GridState, coupling: float = 1.0) -> MeasurementReport:
    _, cov_i = moments(initial)
    _, cov_f = moments(apply_U(initial, coupling))
    rms = {_GRID_FIELDS[kind]: value for kind, value in rms_errors(initial, coupling).items()}

    def std(cov, gen):
        return float(np.sqrt(max(cov[gen, gen], 0.0)))

    return MeasurementReport(
        dx_i=std(cov_i, Generator.X),
        dp_i=std(cov_i, Generator.P),
        dmu_xf=std(cov_f, Generator.MU_X),
        dmu_pf=std(cov_f, Generator.MU_P),
        dx_f=std(cov_f, Generator.X),
        dp_f=std(cov_f, Generator.P),
        hbar=initial.hbar,
        backend="grid",
        **rms,
    )


def backend_agreement(reference: MeasurementReport, other: MeasurementReport) -> dict[str, float]:
    """Relative difference |other - reference| / |reference| for each spread."""
    differences = {}
    for name in DELTA_NAMES:
        a, b = getattr(reference, name), getattr(other, name)
        differences[name] = abs(b - a) / max(abs(a), 1e-300)
    return differences


# ===== Superposition experiment =====


@dataclass(frozen=True)
class PacketMass:
    index: int
    weight: float
    region: Rectangle
    mass: float


def packet_regions(
    packets: Sequence[WavePacket], dist: OutcomeDistribution, region_fraction: float = 0.25
) -> list[Rectangle]:
    """Box around each packet's (mean x, mean p) in pointer coordinates.

    Half-widths are ``region_fraction`` times the smallest nonzero separation
    from another packet along that axis; an axis with no separation spans
    the whole meter axis.
    """
    domain = dist.domain()
    regions = []
    for n, packet in enumerate(packets):
        others = [q for m, q in enumerate(packets) if m != n]
        sep_x = [abs(packet.mean_x - q.mean_x) for q in others if q.mean_x != packet.mean_x]
        sep_p = [abs(packet.mean_p - q.mean_p) for q in others if q.mean_p != packet.mean_p]
        if sep_x:
            d = region_fraction * min(sep_x)
            xlo, xhi = packet.mean_x - d, packet.mean_x + d
        else:
            xlo, xhi = domain.xlo, domain.xhi
        if sep_p:
            d = region_fraction * min(sep_p)
            plo, phi = packet.mean_p - d, packet.mean_p + d
        else:
            plo, phi = domain.plo, domain.phi
        regions.append(clip_rectangle(dist, Rectangle(xlo, xhi, plo, phi)))
    return regions


def superposition_masses(
    initial: GridState,
    packets: Sequence[WavePacket],
    coupling: float = 1.0,
    region_fraction: float = 0.25,
) -> list[PacketMass]:
    """Pointer probability near each packet next to its weight |c_n|^2."""
    dist = outcome_distribution(initial, coupling)
    total = sum(abs(complex(p.coefficient)) ** 2 for p in packets)
    results = []
    for n, (packet, region) in enumerate(zip(packets, packet_regions(packets, dist, region_fraction))):
        weight = abs(complex(packet.coefficient)) ** 2 / total
        mass = region_mass(dist, region)
        logger.info("Packet %d: weight %.6f, region mass %.6f", n, weight, mass)
        results.append(PacketMass(n, weight, region, mass))
    return results
