"""The measurement unitary on the lattice and the rms errors it produces.

U = exp(K_A) exp(K_B) exp(K_C) with K_A = -(ig/hbar) piP p,
K_B = -(ig/hbar) piX x and K_C = -(i g^2 / 2 hbar) piX piP. Each factor
is a pointwise phase in the representation where both of its variables are
diagonal.
"""

import logging

import numpy as np

from ..algebra.generators import Generator
from .lattice import (
    METER_P,
    METER_X,
    MOMENTUM,
    POSITION,
    SYSTEM,
    GridState,
    apply_generator,
    distance,
    expectation,
    to_position,
    to_reps,
)

logger = logging.getLogger(__name__)

RMS_KINDS = ("eiX", "eiP", "efX", "efP", "dX", "dP")


def _phase(state: GridState, reps, exponent) -> GridState:
    state = to_reps(state, reps)
    return state.with_amplitudes(state.amplitudes * np.exp(exponent(state)))


def _factor_c(state: GridState, sign: float, g: float) -> GridState:
    reps = (state.reps[SYSTEM], MOMENTUM, MOMENTUM)
    return _phase(
        state,
        reps,
        lambda s: sign * -1j * g**2 * s.coordinates(METER_X) * s.coordinates(METER_P) / (2 * s.hbar),
    )


def _factor_b(state: GridState, sign: float, g: float) -> GridState:
    reps = (POSITION, MOMENTUM, state.reps[METER_P])
    return _phase(
        state,
        reps,
        lambda s: sign * -1j * g * s.coordinates(SYSTEM) * s.coordinates(METER_X) / s.hbar,
    )


def _factor_a(state: GridState, sign: float, g: float) -> GridState:
    reps = (MOMENTUM, state.reps[METER_X], MOMENTUM)
    return _phase(
        state,
        reps,
        lambda s: sign * -1j * g * s.coordinates(SYSTEM) * s.coordinates(METER_P) / s.hbar,
    )


def apply_U(state: GridState, coupling: float = 1.0) -> GridState:
    state = _factor_c(state, 1.0, coupling)
    state = _factor_b(state, 1.0, coupling)
    state = _factor_a(state, 1.0, coupling)
    return to_position(state)


def apply_U_dagger(state: GridState, coupling: float = 1.0) -> GridState:
    state = _factor_a(state, -1.0, coupling)
    state = _factor_b(state, -1.0, coupling)
    state = _factor_c(state, -1.0, coupling)
    return to_position(state)


# ===== Errors and disturbances =====


def rms_errors(initial: GridState, coupling: float = 1.0) -> dict[str, float]:
    """All six rms quantities ||(A - B)|Psi>||, sharing one forward evolution.

    Retrodictive errors and disturbances compare U^dagger q U |Psi> with
    q|Psi>; predictive errors reduce to ||(mu - q) U|Psi>|| because U^dagger
    is unitary.
    """
    initial = to_position(initial)
    evolved = apply_U(initial, coupling)

    def heisenberg(gen: Generator) -> GridState:
        return apply_U_dagger(apply_generator(evolved, gen), coupling)

    def retro(pointer: Generator, observable: Generator) -> float:
        return distance(heisenberg(pointer), apply_generator(initial, observable))

    def predictive(pointer: Generator, observable: Generator) -> float:
        return distance(apply_generator(evolved, pointer), apply_generator(evolved, observable))

    values = {
        "eiX": retro(Generator.MU_X, Generator.X),
        "eiP": retro(Generator.MU_P, Generator.P),
        "efX": predictive(Generator.MU_X, Generator.X),
        "efP": predictive(Generator.MU_P, Generator.P),
        "dX": retro(Generator.X, Generator.X),
        "dP": retro(Generator.P, Generator.P),
    }
    logger.debug("Grid rms errors: %s", values)
    return values


def rms_error(initial: GridState, kind: str, coupling: float = 1.0) -> float:
    if kind not in RMS_KINDS:
        raise KeyError(f"Unknown rms kind '{kind}'; expected one of {RMS_KINDS}")
    return rms_errors(initial, coupling)[kind]


def mean_error(initial: GridState, kind: str, coupling: float = 1.0) -> float:
    """<Psi|(A - B)|Psi> for the pair behind ``kind``; zero for an unbiased process."""
    pairs = {
        "eiX": (Generator.MU_X, Generator.X, False),
        "eiP": (Generator.MU_P, Generator.P, False),
        "efX": (Generator.MU_X, Generator.X, True),
        "efP": (Generator.MU_P, Generator.P, True),
        "dX": (Generator.X, Generator.X, False),
        "dP": (Generator.P, Generator.P, False),
    }
    if kind not in pairs:
        raise KeyError(f"Unknown kind '{kind}'; expected one of {RMS_KINDS}")
    pointer, observable, after = pairs[kind]
    evolved = apply_U(initial, coupling)
    reference = evolved if after else initial
    return expectation(evolved, pointer) - expectation(reference, observable)
