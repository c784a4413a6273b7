"""Tests for the dense-matrix polarization check."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.report.polarization import MAX_DIMENSION, polarization_check, polarization_reconstruct, traceless_on
from src.utils.errors import DimensionError


class TestPolarization:
    def test_default_check_passes(self):
        assert polarization_check(4, 4, 100, seed=0)

    @pytest.mark.parametrize("dims", [(1, 1), (2, 3), (MAX_DIMENSION, 2)])
    def test_other_dimensions(self, dims):
        assert polarization_check(*dims, trials=10, seed=1)

    @pytest.mark.parametrize("dims", [(0, 4), (4, MAX_DIMENSION + 1)])
    def test_dimension_limits(self, dims):
        with pytest.raises(DimensionError):
            polarization_check(*dims)

    def test_reconstructs_identity_elements(self):
        u = np.array([1.0, 0.0, 0.0])
        v = np.array([0.0, 1.0, 0.0])
        assert polarization_reconstruct(np.eye(3), u, v) == pytest.approx(0.0)
        assert polarization_reconstruct(np.eye(3), u, u) == pytest.approx(1.0)

    def test_reconstructs_arbitrary_element(self):
        rng = np.random.default_rng(7)
        A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        u = rng.normal(size=5) + 1j * rng.normal(size=5)
        v = rng.normal(size=5) + 1j * rng.normal(size=5)
        assert polarization_reconstruct(A, u, v) == pytest.approx(np.vdot(u, A @ v))

    def test_traceless_on_state(self):
        rng = np.random.default_rng(2)
        phi = rng.normal(size=3) + 1j * rng.normal(size=3)
        phi /= np.linalg.norm(phi)
        C = traceless_on(phi, rng.normal(size=(3, 3)))
        assert abs(np.vdot(phi, C @ phi)) < 1e-12
