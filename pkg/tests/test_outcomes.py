"""Tests for pointer outcome distributions, regions and sampling."""

import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.grid.lattice import AXIS_LABELS, AxisSpec, WavePacket, init_product_gaussian, init_superposition
from src.grid.outcomes import (
    Rectangle,
    clip_rectangle,
    outcome_distribution,
    region_mass,
    sample_outcomes,
    write_distribution_csv,
    write_samples_csv,
)
from src.report.measure import packet_regions, superposition_masses
from src.utils.errors import DomainError

WIDTH = 1 / np.sqrt(2)
SMALL_AXES = tuple(AxisSpec(32, 14.0, label) for label in AXIS_LABELS)
# At lambda = 1 each pointer spreads by 1; packets sit sixteen spreads apart in x
TWO_PACKET_AXES = (AxisSpec(128, 32.0, "system"), AxisSpec(64, 32.0, "meterX"), AxisSpec(64, 32.0, "meterP"))
THREE_PACKET_AXES = (AxisSpec(128, 40.0, "system"), AxisSpec(128, 40.0, "meterX"), AxisSpec(64, 16.0, "meterP"))
OFFSET = 8.0


@pytest.fixture(scope="module")
def dist():
    state = init_product_gaussian(SMALL_AXES, 0.5, -0.25, WIDTH, 1.0, edge_margin=5.0)
    return outcome_distribution(state)


@pytest.fixture(scope="module")
def two_packets():
    return [WavePacket(0.6, -OFFSET, 0.0, WIDTH), WavePacket(0.8, OFFSET, 0.0, WIDTH)]


# ===== Tests: Distribution =====

class TestOutcomeDistribution:
    def test_total_mass(self, dist):
        assert dist.total() == pytest.approx(1.0, abs=1e-9)

    def test_marginal_moments(self, dist):
        mean_x, mean_p = dist.mean()
        var_x, var_p = dist.variance()
        # Pointer means copy the system means; variances add lambda^2/2 and hbar^2/(2 lambda^2)
        assert mean_x == pytest.approx(0.5, abs=1e-6)
        assert mean_p == pytest.approx(-0.25, abs=1e-6)
        assert var_x == pytest.approx(1.0, rel=1e-5)
        assert var_p == pytest.approx(1.0, rel=1e-5)

    def test_marginal_normalised(self, dist):
        for axis in range(2):
            assert dist.marginal(axis).sum() * dist.axes[axis].spacing == pytest.approx(1.0, abs=1e-9)

    def test_rejects_negative_weights(self, dist):
        weights = np.array(dist.weights)
        weights[0, 0] = -1.0
        with pytest.raises(DomainError):
            type(dist)(weights, dist.axes)


# ===== Tests: Regions =====

class TestRegionMass:
    def test_whole_domain(self, dist):
        assert region_mass(dist, dist.domain()) == pytest.approx(dist.total())

    def test_empty_rectangle(self, dist):
        assert region_mass(dist, Rectangle(0.0, 0.0, -1.0, 1.0)) == 0.0

    def test_halves_add_up(self, dist):
        d = dist.domain()
        left = region_mass(dist, Rectangle(d.xlo, 0.0, d.plo, d.phi))
        right = region_mass(dist, Rectangle(0.0, d.xhi, d.plo, d.phi))
        assert left + right == pytest.approx(dist.total())

    def test_reversed_bounds(self, dist):
        with pytest.raises(DomainError, match="reversed"):
            region_mass(dist, Rectangle(1.0, 0.0, 0.0, 1.0))

    def test_outside_domain(self, dist):
        with pytest.raises(DomainError, match="leaves"):
            region_mass(dist, Rectangle(-100.0, 0.0, 0.0, 1.0))

    def test_clip(self, dist):
        clipped = clip_rectangle(dist, Rectangle(-100.0, 100.0, -1.0, 1.0))
        assert clipped.xlo == dist.domain().xlo and clipped.xhi == dist.domain().xhi
        assert (clipped.plo, clipped.phi) == (-1.0, 1.0)


# ===== Tests: Superposition =====

class TestSuperposition:
    def test_regions_are_quarter_separation(self, two_packets):
        state = init_superposition(TWO_PACKET_AXES, two_packets, 1.0)
        dist = outcome_distribution(state)
        regions = packet_regions(two_packets, dist)
        # separation 2 OFFSET, half-width OFFSET / 2
        assert (regions[0].xlo, regions[0].xhi) == pytest.approx((-12.0, -4.0))
        assert (regions[1].xlo, regions[1].xhi) == pytest.approx((4.0, 12.0))
        # no separation in p, so the region spans the whole muP axis
        assert (regions[1].plo, regions[1].phi) == (dist.domain().plo, dist.domain().phi)

    def test_masses_track_weights(self, two_packets):
        state = init_superposition(TWO_PACKET_AXES, two_packets, 1.0)
        results = superposition_masses(state, two_packets)
        assert [r.weight for r in results] == pytest.approx([0.36, 0.64])
        assert results[0].mass == pytest.approx(0.36, abs=0.01)
        assert results[1].mass == pytest.approx(0.64, abs=0.01)

    def test_three_equal_packets(self):
        packets = [WavePacket(1.0, x, 0.0, WIDTH) for x in (-12.0, 0.0, 12.0)]
        state = init_superposition(THREE_PACKET_AXES, packets, 1.0)
        results = superposition_masses(state, packets)
        for r in results:
            assert r.weight == pytest.approx(1 / 3)
            assert r.mass == pytest.approx(1 / 3, abs=0.01)

    def test_single_packet_region_is_whole_domain(self):
        packet = WavePacket(1.0, 0.0, 0.0, WIDTH)
        state = init_superposition(SMALL_AXES, [packet], 1.0, edge_margin=5.0)
        (result,) = superposition_masses(state, [packet])
        assert result.mass == pytest.approx(1.0, abs=1e-9)


# ===== Tests: Sampling =====

class TestSampling:
    def test_deterministic(self, dist):
        np.testing.assert_array_equal(sample_outcomes(dist, 100, seed=4), sample_outcomes(dist, 100, seed=4))

    def test_seed_changes_draws(self, dist):
        assert not np.array_equal(sample_outcomes(dist, 100, seed=1), sample_outcomes(dist, 100, seed=2))

    def test_samples_stay_inside_domain(self, dist):
        samples = sample_outcomes(dist, 2000, seed=0)
        d = dist.domain()
        assert samples.shape == (2000, 2)
        assert np.all((samples[:, 0] >= d.xlo) & (samples[:, 0] <= d.xhi))
        assert np.all((samples[:, 1] >= d.plo) & (samples[:, 1] <= d.phi))

    def test_monte_carlo_mean(self, dist):
        samples = sample_outcomes(dist, 20000, seed=11)
        assert samples[:, 0].mean() == pytest.approx(0.5, abs=0.05)
        assert samples[:, 1].mean() == pytest.approx(-0.25, abs=0.05)

    def test_count_must_be_positive(self, dist):
        with pytest.raises(DomainError):
            sample_outcomes(dist, 0)


# ===== Tests: Export =====

class TestExport:
    def test_distribution_csv(self, dist, tmp_path):
        path = write_distribution_csv(dist, tmp_path / "distribution.csv")
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["muX", "muP", "weight"]
        assert len(rows) == 1 + 32 * 32
        assert float(rows[1][0]) == dist.axes[0].positions()[0]
        assert float(rows[2][1]) == dist.axes[1].positions()[1]

    def test_samples_csv_round_trips_doubles(self, dist, tmp_path):
        samples = sample_outcomes(dist, 10, seed=3)
        path = write_samples_csv(samples, tmp_path / "samples.csv")
        with open(path, newline="") as f:
            rows = list(csv.reader(f))[1:]
        np.testing.assert_array_equal(np.array(rows, dtype=float), samples)
