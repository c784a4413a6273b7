"""Three-axis wavefunction lattice for the system and both meters.

Conventions (one everywhere):
    positions   x_j = (j - n/2) dx,  dx = length / n
    momenta     p_k = (k - n/2) dp,  dp = 2 pi hbar / length
    forward     psi~(p) = (2 pi hbar)^(-1/2) sum_j exp(-i p x_j / hbar) psi(x_j) dx

so a position-space Gaussian of variance s^2 maps to a momentum-space
Gaussian of variance hbar^2 / (4 s^2). Norms are sum |a|^2 times the cell
volume of the current representation, so transforms preserve them exactly.
"""

import logging
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
import scipy.fft

from ..algebra.generators import Generator
from ..gaussian.moments import (
    GaussianState,
    ak_apparatus_state,
    ak_transfer_matrix,
    apparatus_wavefunction,
    coherent_system,
    compose_product,
    evolve,
)
from ..utils.errors import DomainError, ResolutionError

logger = logging.getLogger(__name__)

Representation = Literal["position", "momentum"]
POSITION: Representation = "position"
MOMENTUM: Representation = "momentum"

AXIS_LABELS = ("system", "meterX", "meterP")
SYSTEM, METER_X, METER_P = range(3)

DEFAULT_EDGE_MARGIN = 6.0
DEFAULT_OVERLAP_WARNING = 1e-3


@dataclass(frozen=True)
class AxisSpec:
    n: int
    length: float
    label: str = "system"

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise DomainError(f"Axis '{self.label}': n must be a power of two >= 8, got {self.n}")
        if self.length <= 0:
            raise DomainError(f"Axis '{self.label}': length must be positive, got {self.length}")
        if self.label not in AXIS_LABELS:
            raise DomainError(f"Unknown axis label '{self.label}'")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    def momentum_spacing(self, hbar: float) -> float:
        return 2.0 * np.pi * hbar / self.length

    def momentum_half_extent(self, hbar: float) -> float:
        return np.pi * hbar / self.spacing

    def positions(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.spacing

    def momenta(self, hbar: float) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.momentum_spacing(hbar)

    def coordinates(self, rep: Representation, hbar: float) -> np.ndarray:
        return self.positions() if rep == POSITION else self.momenta(hbar)

    def cell(self, rep: Representation, hbar: float) -> float:
        return self.spacing if rep == POSITION else self.momentum_spacing(hbar)


def default_axes(n: int = 64, length: float = 20.0) -> tuple[AxisSpec, AxisSpec, AxisSpec]:
    return tuple(AxisSpec(n, length, label) for label in AXIS_LABELS)


@dataclass(frozen=True)
class WavePacket:
    """Gaussian system packet with position standard deviation ``width``."""

    coefficient: complex
    mean_x: float
    mean_p: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError(f"Packet width must be positive, got {self.width}")

    def amplitudes(self, x: np.ndarray, hbar: float) -> np.ndarray:
        envelope = (2 * np.pi * self.width**2) ** -0.25 * np.exp(
            -((x - self.mean_x) ** 2) / (4 * self.width**2)
        )
        return envelope * np.exp(1j * self.mean_p * (x - self.mean_x) / hbar)


@dataclass(frozen=True, eq=False)
class GridState:
    amplitudes: np.ndarray
    axes: tuple[AxisSpec, AxisSpec, AxisSpec]
    reps: tuple[Representation, Representation, Representation] = (POSITION, POSITION, POSITION)
    hbar: float = 1.0

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        shape = tuple(axis.n for axis in self.axes)
        if amplitudes.shape != shape:
            raise DomainError(f"Amplitude shape {amplitudes.shape} does not match axes {shape}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    def cell_volume(self) -> float:
        return float(np.prod([a.cell(r, self.hbar) for a, r in zip(self.axes, self.reps)]))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.cell_volume())

    def coordinates(self, axis: int) -> np.ndarray:
        """Coordinates of ``axis`` in its current representation, shaped to broadcast."""
        shape = [1, 1, 1]
        shape[axis] = -1
        return self.axes[axis].coordinates(self.reps[axis], self.hbar).reshape(shape)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "GridState":
        return replace(self, amplitudes=amplitudes)


# ===== Transforms =====


def to_representation(state: GridState, axis: int, target: Representation) -> GridState:
    current = state.reps[axis]
    if current == target:
        return state
    spec = state.axes[axis]
    dx, dp = spec.spacing, spec.momentum_spacing(state.hbar)
    a = scipy.fft.ifftshift(state.amplitudes, axes=axis)
    if target == MOMENTUM:
        a = scipy.fft.fft(a, axis=axis, norm="ortho") * np.sqrt(dx / dp)
    else:
        a = scipy.fft.ifft(a, axis=axis, norm="ortho") * np.sqrt(dp / dx)
    a = scipy.fft.fftshift(a, axes=axis)
    reps = list(state.reps)
    reps[axis] = target
    return replace(state, amplitudes=a, reps=tuple(reps))


def to_reps(state: GridState, reps: Sequence[Representation]) -> GridState:
    for axis, target in enumerate(reps):
        state = to_representation(state, axis, target)
    return state


def to_position(state: GridState) -> GridState:
    return to_reps(state, (POSITION, POSITION, POSITION))


def inner(a: GridState, b: GridState) -> complex:
    """<a|b> over the lattice."""
    a, b = to_position(a), to_position(b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.cell_volume())


def distance(a: GridState, b: GridState) -> float:
    """||a - b|| for two states on the same lattice."""
    a, b = to_position(a), to_position(b)
    return float(np.sqrt(np.sum(np.abs(a.amplitudes - b.amplitudes) ** 2) * a.cell_volume()))


# ===== Generators on the lattice =====


def apply_generator(state: GridState, gen: Generator) -> GridState:
    """q|state>, multiplying in the representation where q is diagonal."""
    axis = gen.mode
    state = to_representation(state, axis, MOMENTUM if gen.is_momentum else POSITION)
    return state.with_amplitudes(state.amplitudes * state.coordinates(axis))


def expectation(state: GridState, gen: Generator) -> float:
    return inner(state, apply_generator(state, gen)).real


def moments(state: GridState) -> tuple[np.ndarray, np.ndarray]:
    """Means and symmetrised covariance of the six generators, measured on the lattice."""
    state = to_position(state)
    images = [to_position(apply_generator(state, gen)) for gen in Generator]
    volume = state.cell_volume()
    mean = np.array([np.vdot(state.amplitudes, v.amplitudes).real * volume for v in images])
    second = np.empty((len(images), len(images)))
    for j, vj in enumerate(images):
        for k in range(j, len(images)):
            value = np.vdot(vj.amplitudes, images[k].amplitudes).real * volume
            second[j, k] = second[k, j] = value
    return mean, second - np.outer(mean, mean)


# ===== Initial states =====


def check_resolution(
    axes: Sequence[AxisSpec],
    packets: Sequence[WavePacket],
    lam: float,
    hbar: float = 1.0,
    coupling: float = 1.0,
    edge_margin: float = DEFAULT_EDGE_MARGIN,
) -> list[str]:
    """Problems that make the lattice untrustworthy for these packets (empty when fine).

    Each packet, tensored with the apparatus, must stay ``edge_margin``
    standard deviations inside the position half-length and the momentum
    half-extent of every axis, before and after the interaction.
    """
    problems = []
    S = ak_transfer_matrix(coupling, hbar)
    apparatus = ak_apparatus_state(lam, hbar)
    for index, packet in enumerate(packets):
        before = compose_product(*coherent_system(packet.width, packet.mean_x, packet.mean_p, hbar), apparatus)
        after = evolve(before, S)
        for stage, state in (("initial", before), ("final", after)):
            problems.extend(_packet_problems(axes, state, hbar, edge_margin, f"packet {index} {stage}"))
        for gen in Generator:
            if not gen.is_momentum and axes[gen.mode].length < 8 * before.std(gen):
                problems.append(
                    f"packet {index}: axis '{axes[gen.mode].label}' length {axes[gen.mode].length:g} "
                    f"is shorter than 8 standard deviations of {gen.label}"
                )
    return problems


def _packet_problems(axes, state: GaussianState, hbar: float, edge_margin: float, where: str) -> list[str]:
    problems = []
    for gen in Generator:
        axis = axes[gen.mode]
        bound = axis.momentum_half_extent(hbar) if gen.is_momentum else axis.length / 2
        reach = abs(state.mean[gen]) + edge_margin * state.std(gen)
        if reach > bound:
            problems.append(
                f"{where}: {gen.label} reaches {reach:.4g} but axis '{axis.label}' "
                f"{'momentum' if gen.is_momentum else 'position'} half-extent is {bound:.4g}"
            )
    return problems


def packet_overlaps(axis: AxisSpec, packets: Sequence[WavePacket], hbar: float = 1.0) -> np.ndarray:
    """|<chi_m|chi_n>| for the normalised packet shapes, measured on the system axis."""
    x = axis.positions()
    shapes = [packet.amplitudes(x, hbar) for packet in packets]
    count = len(shapes)
    overlaps = np.eye(count)
    for m in range(count):
        for n in range(m + 1, count):
            overlaps[m, n] = overlaps[n, m] = abs(np.vdot(shapes[m], shapes[n]) * axis.spacing)
    return overlaps


def init_superposition(
    axes: Sequence[AxisSpec],
    packets: Sequence[WavePacket],
    lam: float,
    hbar: float = 1.0,
    coupling: float = 1.0,
    edge_margin: float = DEFAULT_EDGE_MARGIN,
    on_unresolved: str = "raise",
    overlap_warning: float = DEFAULT_OVERLAP_WARNING,
) -> GridState:
    """sum_n c_n chi_n, normalised, tensored with the apparatus state."""
    if not packets:
        raise DomainError("At least one packet is required")
    if lam <= 0 or hbar <= 0:
        raise DomainError("lambda and hbar must be positive")
    axes = tuple(axes)

    problems = check_resolution(axes, packets, lam, hbar, coupling, edge_margin)
    if problems:
        if on_unresolved == "raise":
            raise ResolutionError("; ".join(problems))
        for problem in problems:
            logger.warning("Under-resolved lattice: %s", problem)

    if len(packets) > 1:
        overlaps = packet_overlaps(axes[SYSTEM], packets, hbar)
        worst = float(np.max(overlaps - np.eye(len(packets))))
        if worst > overlap_warning:
            logger.warning("Packets are not well separated: largest overlap %.3e", worst)

    x = axes[SYSTEM].positions()
    system = sum(complex(packet.coefficient) * packet.amplitudes(x, hbar) for packet in packets)
    meters = apparatus_wavefunction(axes[METER_X].positions()[:, None], axes[METER_P].positions()[None, :], lam, hbar)
    amplitudes = system[:, None, None] * meters[None, :, :]

    state = GridState(amplitudes, axes, (POSITION, POSITION, POSITION), hbar)
    norm = state.norm()
    if norm <= 0:
        raise DomainError("Superposition has zero norm")
    logger.debug("Initialised %d packet(s) on %s lattice", len(packets), amplitudes.shape)
    return state.with_amplitudes(amplitudes / np.sqrt(norm))


def init_product_gaussian(
    axes: Sequence[AxisSpec],
    system_mean_x: float,
    system_mean_p: float,
    system_width: float,
    lam: float,
    hbar: float = 1.0,
    **options,
) -> GridState:
    packet = WavePacket(1.0, system_mean_x, system_mean_p, system_width)
    return init_superposition(axes, [packet], lam, hbar, **options)
