"""Phase grids, random and aligned configurations, combined channel."""

import itertools

import numpy as np
import pytest

from irskg.irs import (PhaseConfig, combined_channel, mrt_phase_config, phase_grid,
                       random_phase_config)
from irskg.propagation import Geometry, PathLossModel, sample_channel_set

WAVELENGTH = 0.299792458


def _channels(seed=1, n_elements=8, *, eve_positions=None):
    geo = Geometry() if eve_positions is None else Geometry(eve_positions=eve_positions)
    rng = np.random.default_rng(seed)
    return sample_channel_set(geo, PathLossModel(), n_elements, WAVELENGTH, rng)


class TestPhaseGrid:
    def test_one_bit(self):
        np.testing.assert_allclose(phase_grid(1), [0.0, np.pi])

    def test_three_bits(self):
        grid = phase_grid(3)
        assert grid.shape == (8,)
        np.testing.assert_allclose(np.diff(grid), np.pi / 4.0)
        assert grid[0] == 0.0

    def test_invalid_bits(self):
        with pytest.raises(ValueError):
            phase_grid(0)
        with pytest.raises(ValueError):
            PhaseConfig(theta=[0.0], bits=0)


class TestRandomPhaseConfig:
    def test_one_bit_values(self):
        rng = np.random.default_rng(2)
        cfg = random_phase_config(1000, 1, rng)
        assert set(np.unique(cfg.theta)) <= {0.0, np.pi}
        assert cfg.bits == 1 and len(cfg) == 1000

    def test_grid_membership(self):
        rng = np.random.default_rng(3)
        grid = phase_grid(3)
        for _ in range(20):
            cfg = random_phase_config(16, 3, rng)
            assert np.all(np.isin(cfg.theta, grid))

    def test_uniform_and_zero_mean(self):
        rng = np.random.default_rng(4)
        draws = np.concatenate([random_phase_config(64, 3, rng).theta
                                for _ in range(400)])
        counts = np.bincount((draws / (np.pi / 4.0)).round().astype(int) % 8,
                             minlength=8)
        assert counts.min() > 0.9 * draws.size / 8
        # the grid is balanced, so the phasor mean vanishes
        assert abs(np.mean(np.exp(1j * draws))) < 3.0 / np.sqrt(draws.size)

    def test_invalid_args(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            random_phase_config(0, 3, rng)
        with pytest.raises(ValueError):
            random_phase_config(4, 0, rng)


class TestMrtPhaseConfig:
    def test_continuous_alignment(self):
        cs = _channels(seed=5)
        cfg = mrt_phase_config(cs)
        g = combined_channel(cs.h_ab, cs.cascade(), cfg)
        best = abs(cs.h_ab) + np.sum(np.abs(cs.cascade()))
        assert abs(g) == pytest.approx(best, rel=1e-12)
        assert cfg.bits is None

    def test_quantized_bound(self):
        # rounding to a B-bit grid costs at most a half-step pi/2^B per
        # element, so each cascade term keeps a cos(pi/2^B) fraction of its
        # aligned contribution
        for bits, seed in [(2, 6), (3, 7), (3, 8)]:
            cs = _channels(seed=seed, n_elements=32)
            cfg = mrt_phase_config(cs, bits=bits)
            g = combined_channel(cs.h_ab, cs.cascade(), cfg)
            floor = abs(cs.h_ab) + np.cos(np.pi / 2 ** bits) * np.sum(np.abs(cs.cascade()))
            assert abs(g) >= floor - 1e-15
            assert np.all(np.isin(cfg.theta, phase_grid(bits)))

    def test_continuous_beats_every_grid_config(self):
        cs = _channels(seed=9, n_elements=3)
        best = abs(combined_channel(cs.h_ab, cs.cascade(), mrt_phase_config(cs)))
        grid = phase_grid(2)
        for combo in itertools.product(grid, repeat=3):
            g = combined_channel(cs.h_ab, cs.cascade(), PhaseConfig(theta=combo, bits=2))
            assert abs(g) <= best + 1e-15

    def test_empty_channel_set_rejected(self):
        cs = _channels(seed=10, n_elements=1)
        object.__setattr__(cs, "u", np.zeros(0, dtype=complex))
        object.__setattr__(cs, "v", np.zeros(0, dtype=complex))
        with pytest.raises(ValueError):
            mrt_phase_config(cs)
        with pytest.raises(ValueError):
            mrt_phase_config(_channels(seed=10), bits=0)


class TestCombinedChannel:
    def test_no_surface(self):
        cfg = PhaseConfig(theta=np.zeros(0))
        assert combined_channel(0.0, np.zeros(0, dtype=complex), cfg) == 0.0
        assert combined_channel(2.0 + 1.0j, np.zeros(0, dtype=complex), cfg) == 2.0 + 1.0j

    def test_destructive_single_element(self):
        g = combined_channel(1.0, np.array([1.0 + 0.0j]), PhaseConfig(theta=[np.pi]))
        assert abs(g) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            combined_channel(1.0, np.ones(3, dtype=complex), PhaseConfig(theta=[0.0, 0.0]))

    def test_variance_over_random_configs(self):
        # with the channels held fixed the randomness comes only from the
        # phases, and the combined coefficient has variance sum |u_n v_n|^2
        cs = _channels(seed=11, n_elements=8)
        rng = np.random.default_rng(12)
        g = np.array([combined_channel(cs.h_ab, cs.cascade(),
                                       random_phase_config(8, 3, rng))
                      for _ in range(20000)])
        emp = np.mean(np.abs(g - np.mean(g)) ** 2)
        assert emp == pytest.approx(np.sum(np.abs(cs.cascade()) ** 2), rel=0.05)
        # the mean is the direct path: random phases average the surface out
        assert abs(np.mean(g) - cs.h_ab) < 0.05 * np.sqrt(np.sum(np.abs(cs.cascade()) ** 2))
