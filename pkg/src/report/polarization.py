"""Dense-matrix check of the polarization identity on a product space.

For states u = psi (x) phi and v = psi' (x) phi,

    <u|A|v> = (D(u+v) - D(u-v) - i D(u+iv) + i D(u-iv)) / 4,   D(w) = <w|A|w>,

so when <psi (x) phi|A|psi (x) phi> vanishes for every psi, every
off-diagonal element <psi (x) phi|A|psi' (x) phi> vanishes as well.
"""

import logging

import numpy as np

from ..utils.errors import DimensionError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 16
DEFAULT_TOLERANCE = 1e-10


def _diagonal(A: np.ndarray, w: np.ndarray) -> complex:
    return complex(np.vdot(w, A @ w))


def polarization_reconstruct(A: np.ndarray, u: np.ndarray, v: np.ndarray) -> complex:
    """<u|A|v> rebuilt from four diagonal elements."""
    return 0.25 * (
        _diagonal(A, u + v)
        - _diagonal(A, u - v)
        - 1j * _diagonal(A, u + 1j * v)
        + 1j * _diagonal(A, u - 1j * v)
    )


def _random_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def traceless_on(phi: np.ndarray, C: np.ndarray) -> np.ndarray:
    """C - <phi|C|phi> I, whose expectation in the unit vector phi is zero."""
    return C - _diagonal(C, phi) * np.eye(C.shape[0])


def polarization_check(
    dim1: int,
    dim2: int,
    trials: int = 100,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> bool:
    """True iff every trial reconstructs off-diagonal elements and the vanishing case holds."""
    for dim in (dim1, dim2):
        if not 1 <= dim <= MAX_DIMENSION:
            raise DimensionError(f"Dimensions must lie in [1, {MAX_DIMENSION}], got {dim}")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        phi = _random_vector(rng, dim2)
        psi, psi_prime = _random_vector(rng, dim1), _random_vector(rng, dim1)
        u, v = np.kron(psi, phi), np.kron(psi_prime, phi)

        A = _random_matrix(rng, dim1 * dim2)
        direct = complex(np.vdot(u, A @ v))
        scale = max(1.0, float(np.linalg.norm(A)))
        if abs(polarization_reconstruct(A, u, v) - direct) > tolerance * scale:
            logger.warning("Trial %d: polarization identity failed to reconstruct <u|A|v>", trial)
            return False

        # A = sum_k B_k (x) C_k with <phi|C_k|phi> = 0 has vanishing diagonal on psi (x) phi
        A0 = sum(
            np.kron(_random_matrix(rng, dim1), traceless_on(phi, _random_matrix(rng, dim2)))
            for _ in range(2)
        )
        scale = max(1.0, float(np.linalg.norm(A0)))
        if abs(_diagonal(A0, u)) > tolerance * scale:
            logger.warning("Trial %d: engineered operator has a nonzero diagonal element", trial)
            return False
        if abs(complex(np.vdot(u, A0 @ v))) > tolerance * scale:
            logger.warning("Trial %d: off-diagonal element did not vanish", trial)
            return False
    return True
