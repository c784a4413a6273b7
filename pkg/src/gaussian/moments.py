"""Exact second-moment backend.

Means and symmetrised covariances of the canonical vector
(x, p, muX, piX, muP, piP) are pushed through the linear Heisenberg finals:
mean -> S mean + shift, cov -> S cov S^T. Every rms error and disturbance
of a Gaussian scenario then follows in closed form.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy import integrate, linalg

from ..algebra.conjugation import ak_generator, heisenberg_finals
from ..algebra.generators import NUM_GENERATORS, Generator, standard_omega
from ..algebra.polynomial import CanonicalPolynomial, LinearForm, linear_part
from ..utils.errors import AdmissibilityError, DomainError

logger = logging.getLogger(__name__)

ADMISSIBILITY_TOLERANCE = 1e-10

OMEGA = np.array(standard_omega(), dtype=float)


def symplectic_form(modes: int) -> np.ndarray:
    """Omega for ``modes`` conjugate pairs laid out (q1, p1, q2, p2, ...)."""
    return linalg.block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * modes))


def admissibility_margin(cov: np.ndarray, hbar: float) -> float:
    """Smallest eigenvalue of cov + (i hbar / 2) Omega, scaled by the matrix size."""
    cov = np.asarray(cov, dtype=float)
    omega = symplectic_form(cov.shape[0] // 2)
    eigenvalues = linalg.eigvalsh(cov + 0.5j * hbar * omega)
    scale = max(1.0, float(np.max(np.abs(cov))))
    return float(eigenvalues[0]) / scale


def check_admissible(cov: np.ndarray, hbar: float, tolerance: float = ADMISSIBILITY_TOLERANCE) -> None:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise AdmissibilityError(f"Covariance must be square with even size, got {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(cov))))):
        raise AdmissibilityError("Covariance is not symmetric")
    margin = admissibility_margin(cov, hbar)
    if margin < -tolerance:
        raise AdmissibilityError(
            f"Covariance violates the uncertainty principle (min eigenvalue {margin:.3e})"
        )


# ===== Types =====


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Means and symmetrised covariance of the six canonical operators."""

    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (NUM_GENERATORS,) or cov.shape != (NUM_GENERATORS, NUM_GENERATORS):
            raise AdmissibilityError(
                f"Expected a 6-vector and a 6x6 covariance, got {mean.shape} and {cov.shape}"
            )
        if self.hbar <= 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        check_admissible(cov, self.hbar)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def variance(self, gen: Generator) -> float:
        return float(self.cov[gen, gen])

    def std(self, gen: Generator) -> float:
        return float(np.sqrt(max(self.cov[gen, gen], 0.0)))


@dataclass(frozen=True, eq=False)
class ApparatusBlock:
    """Meter moments in the order (muX, piX, muP, piP)."""

    mean: np.ndarray
    cov: np.ndarray
    lam: float
    hbar: float


@dataclass(frozen=True, eq=False)
class QuadraticObservable:
    """O = q^T M q (symmetrised) + linear . q + constant."""

    matrix: np.ndarray
    linear: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-14):
            raise DomainError("Quadratic form matrix is not symmetric")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=float))

    @classmethod
    def from_linear_square(cls, form: LinearForm, hbar: float) -> "QuadraticObservable":
        """The square (v.q + c)^2 of a Hermitian linear form."""
        v, c = form.numeric(hbar)
        return cls(np.outer(v, v), 2.0 * c * v, c * c)

    @classmethod
    def from_polynomial(cls, P: CanonicalPolynomial, hbar: float) -> "QuadraticObservable":
        """Symmetrised form of a Hermitian polynomial of degree <= 2.

        A normal-ordered product q_j q_k (j < k) equals its symmetrisation
        plus (i hbar / 2) Omega_jk, which is folded into the constant.
        """
        if P.degree > 2:
            raise DomainError(f"Polynomial '{P}' has degree {P.degree}; at most 2 is supported")
        matrix = np.zeros((NUM_GENERATORS, NUM_GENERATORS), dtype=complex)
        linear = np.zeros(NUM_GENERATORS, dtype=complex)
        constant = 0j
        for monomial, coeff in P.terms:
            value = coeff.evaluate(hbar)
            indices = [i for i, power in enumerate(monomial) for _ in range(power)]
            if not indices:
                constant += value
            elif len(indices) == 1:
                linear[indices[0]] += value
            else:
                j, k = indices
                if j == k:
                    matrix[j, j] += value
                else:
                    matrix[j, k] += value / 2
                    matrix[k, j] += value / 2
                    constant += value * 0.5j * hbar * OMEGA[j, k]
        if np.max(np.abs(matrix.imag)) > 1e-12 or np.max(np.abs(linear.imag)) > 1e-12 or abs(constant.imag) > 1e-12:
            raise DomainError(f"Polynomial '{P}' is not Hermitian")
        return cls(matrix.real, linear.real, constant.real)

    def expectation(self, state: GaussianState) -> float:
        m = state.mean
        return float(
            np.trace(self.matrix @ state.cov) + m @ self.matrix @ m + self.linear @ m + self.constant
        )


@dataclass(frozen=True)
class PointerVariances:
    mu_xf: float
    mu_pf: float
    xf: float
    pf: float


# ===== Apparatus =====


def apparatus_wavefunction(mu_x, mu_p, lam: float, hbar: float = 1.0):
    """phi(muX, muP) = (2/sqrt(h)) exp(-muX^2/lam^2 - lam^2 muP^2/hbar^2), h = 2 pi hbar."""
    h = 2.0 * np.pi * hbar
    return 2.0 / np.sqrt(h) * np.exp(-(mu_x**2) / lam**2 - lam**2 * mu_p**2 / hbar**2)


def ak_apparatus_state(lam: float, hbar: float = 1.0) -> ApparatusBlock:
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if hbar <= 0:
        raise DomainError(f"hbar must be positive, got {hbar}")
    cov = np.diag([lam**2 / 4, hbar**2 / lam**2, hbar**2 / (4 * lam**2), lam**2])
    return ApparatusBlock(np.zeros(4), cov, lam, hbar)


def apparatus_quadrature(lam: float, hbar: float = 1.0) -> tuple[float, float, float]:
    """Norm, Var(muX) and Var(muP) of the apparatus wavefunction by numerical quadrature."""

    def density(mu_p, mu_x):
        return abs(apparatus_wavefunction(mu_x, mu_p, lam, hbar)) ** 2

    norm, _ = integrate.dblquad(density, -np.inf, np.inf, -np.inf, np.inf)
    var_x, _ = integrate.dblquad(lambda mp, mx: mx**2 * density(mp, mx), -np.inf, np.inf, -np.inf, np.inf)
    var_p, _ = integrate.dblquad(lambda mp, mx: mp**2 * density(mp, mx), -np.inf, np.inf, -np.inf, np.inf)
    return norm, var_x / norm, var_p / norm


# ===== System blocks =====


def coherent_system(
    width: float, mean_x: float = 0.0, mean_p: float = 0.0, hbar: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-uncertainty Gaussian with position standard deviation ``width``."""
    if width <= 0:
        raise DomainError(f"width must be positive, got {width}")
    cov = np.diag([width**2, hbar**2 / (4 * width**2)])
    return np.array([mean_x, mean_p], dtype=float), cov


def random_system(
    rng: np.random.Generator, hbar: float = 1.0, mean_scale: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Squeezed, rotated and thermalised system block; always admissible."""
    r = rng.uniform(-1.0, 1.0)
    theta = rng.uniform(0.0, np.pi)
    thermal = rng.uniform(1.0, 3.0)
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    cov = thermal * 0.5 * hbar * rotation @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ rotation.T
    cov = 0.5 * (cov + cov.T)
    return rng.normal(0.0, mean_scale, size=2), cov


def compose_product(system_mean, system_cov, apparatus: ApparatusBlock) -> GaussianState:
    system_mean = np.asarray(system_mean, dtype=float)
    system_cov = np.asarray(system_cov, dtype=float)
    if system_mean.shape != (2,) or system_cov.shape != (2, 2):
        raise AdmissibilityError("System block must be a 2-vector and a 2x2 covariance")
    mean = np.concatenate([system_mean, apparatus.mean])
    cov = linalg.block_diag(system_cov, apparatus.cov)
    return GaussianState(mean, cov, apparatus.hbar)


# ===== Evolution =====


def transfer_matrix(
    finals: Mapping[Generator, CanonicalPolynomial], hbar: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Numeric S and constant shift with q_f = S q + shift."""
    S = np.zeros((NUM_GENERATORS, NUM_GENERATORS))
    shift = np.zeros(NUM_GENERATORS)
    for gen in Generator:
        row, constant = linear_part(finals[gen]).numeric(hbar)
        S[gen] = row
        shift[gen] = constant
    return S, shift


@lru_cache(maxsize=64)
def _ak_transfer(g: float, hbar: float) -> tuple[tuple[float, ...], ...]:
    S, _ = transfer_matrix(heisenberg_finals(ak_generator(g)), hbar)
    logger.debug("Built transfer matrix for g=%s, hbar=%s", g, hbar)
    return tuple(map(tuple, S))


def ak_transfer_matrix(g: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    return np.array(_ak_transfer(float(g), float(hbar)))


def evolve(state: GaussianState, S: np.ndarray, shift: np.ndarray | None = None) -> GaussianState:
    S = np.asarray(S, dtype=float)
    mean = S @ state.mean
    if shift is not None:
        mean = mean + shift
    cov = S @ state.cov @ S.T
    return GaussianState(mean, 0.5 * (cov + cov.T), state.hbar)


def rms_value(state: GaussianState, obs: LinearForm) -> float:
    v, c = obs.numeric(state.hbar)
    second = v @ state.cov @ v + (v @ state.mean + c) ** 2
    return float(np.sqrt(max(second, 0.0)))


def pointer_variances(state_after: GaussianState) -> PointerVariances:
    return PointerVariances(
        mu_xf=state_after.variance(Generator.MU_X),
        mu_pf=state_after.variance(Generator.MU_P),
        xf=state_after.variance(Generator.X),
        pf=state_after.variance(Generator.P),
    )
